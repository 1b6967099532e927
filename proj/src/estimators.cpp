// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#include "thzce/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/SVD>

#include "thzce/probit.hpp"

namespace thzce::estimators {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "LR") return Algorithm::Lr;
    if (name == "NN") return Algorithm::Nn;
    if (name == "PGA") return Algorithm::Pga;
    if (name == "FW") return Algorithm::Fw;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected LR, NN, PGA or FW)");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Lr: return "LR";
        case Algorithm::Nn: return "NN";
        case Algorithm::Pga: return "PGA";
        case Algorithm::Fw: return "FW";
    }
    return "?";
}

namespace {

bool is_ascent(Algorithm a) { return a == Algorithm::Pga || a == Algorithm::Fw; }

// Fill in per-algorithm defaults and validate the invariants.
EstimatorConfig resolve_config(EstimatorConfig cfg, const frontend::ObservationBlock& obs,
                               const frontend::PilotMatrix& pilots) {
    const auto n_p = static_cast<double>(pilots.X.cols());
    if (cfg.learning_rate == 0.0)
        cfg.learning_rate = is_ascent(cfg.algorithm) ? 1.0 / n_p : 0.01;
    if (cfg.decay == 0.0) cfg.decay = is_ascent(cfg.algorithm) ? 0.5 : 0.7;
    if (cfg.noise_std == 0.0) cfg.noise_std = std::sqrt(obs.noise_power / 2.0);
    const int max_rank = static_cast<int>(std::min(obs.Y.rows(), pilots.X.rows()));
    if (cfg.rank == 0) cfg.rank = max_rank;

    if (cfg.epochs < 1) throw std::invalid_argument("estimator: epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("estimator: learning rate must be > 0");
    if (!(cfg.decay > 0.0 && cfg.decay <= 1.0))
        throw std::invalid_argument("estimator: decay must be in (0, 1]");
    if (!(cfg.stop_tolerance > 0.0)) throw std::invalid_argument("estimator: stop tolerance must be > 0");
    if (cfg.regularization < 0.0) throw std::invalid_argument("estimator: lambda must be >= 0");
    if (cfg.rank < 1 || cfg.rank > max_rank)
        throw std::invalid_argument("estimator: rank must be in [1, min(Mr, Mt)]");
    if (is_ascent(cfg.algorithm) && !(cfg.noise_std > 0.0))
        throw std::invalid_argument("estimator: noise std must be > 0 for the likelihood objective");
    return cfg;
}

// pre-activation H x_n + z for each pilot, in the stacked layout
MatrixXd forward(const MatrixXd& H, const MatrixXd& z, const MatrixXd& pilot_stack) {
    MatrixXd pre = H * pilot_stack;
    if (z.size() > 0) {
        for (Eigen::Index c = 0; c < pre.cols(); c += 2) pre.col(c) += z.col(0);
        for (Eigen::Index c = 1; c < pre.cols(); c += 2) pre.col(c) += z.col(1);
    }
    return pre;
}

// fold the stacked residual back onto the two z columns
MatrixXd fold_bias(const MatrixXd& residual) {
    MatrixXd g = MatrixXd::Zero(residual.rows(), 2);
    for (Eigen::Index c = 0; c < residual.cols(); c += 2) g.col(0) += residual.col(c);
    for (Eigen::Index c = 1; c < residual.cols(); c += 2) g.col(1) += residual.col(c);
    return g;
}

double pilot_count(const MatrixXd& pilot_stack) {
    return static_cast<double>(pilot_stack.cols()) / 2.0;
}

} // namespace

double loss_ls(const MatrixXd& H, const MatrixXd& z, const MatrixXd& pilot_stack,
               const MatrixXd& target_stack, Activation activation, double lambda) {
    MatrixXd out = forward(H, z, pilot_stack);
    if (activation == Activation::Tanh) out = out.array().tanh();
    const double n = pilot_count(pilot_stack);
    return (out - target_stack).squaredNorm() / n + lambda * H.squaredNorm();
}

void grad_ls(const MatrixXd& H, const MatrixXd& z, const MatrixXd& pilot_stack,
             const MatrixXd& target_stack, Activation activation, double lambda,
             MatrixXd& grad_H, MatrixXd& grad_z) {
    const MatrixXd pre = forward(H, z, pilot_stack);
    const double n = pilot_count(pilot_stack);
    MatrixXd d; // dLoss/dPre
    if (activation == Activation::Tanh) {
        const MatrixXd th = pre.array().tanh();
        d = (2.0 / n) * (th - target_stack).cwiseProduct(MatrixXd::Ones(th.rows(), th.cols()) -
                                                         th.cwiseProduct(th));
    } else {
        d = (2.0 / n) * (pre - target_stack);
    }
    grad_H = d * pilot_stack.transpose() + 2.0 * lambda * H;
    grad_z = fold_bias(d);
}

double loss_bce(const MatrixXd& H, const MatrixXd& z, const MatrixXd& pilot_stack,
                const MatrixXd& target_stack, double lambda) {
    const MatrixXd pre = forward(H, z, pilot_stack);
    const double n = pilot_count(pilot_stack);
    double sum = 0.0;
    for (Eigen::Index c = 0; c < pre.cols(); ++c) {
        for (Eigen::Index r = 0; r < pre.rows(); ++r) {
            const double a = pre(r, c);
            const double t01 = 0.5 * (target_stack(r, c) + 1.0);
            // softplus(a) - t*a, evaluated without overflow
            const double softplus = std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
            sum += softplus - t01 * a;
        }
    }
    return sum / n + lambda * H.squaredNorm();
}

void grad_bce(const MatrixXd& H, const MatrixXd& z, const MatrixXd& pilot_stack,
              const MatrixXd& target_stack, double lambda, MatrixXd& grad_H,
              MatrixXd& grad_z) {
    MatrixXd pre = forward(H, z, pilot_stack);
    const double n = pilot_count(pilot_stack);
    // d/da [softplus(a) - t a] = sigmoid(a) - t
    MatrixXd d =
        ((1.0 + (-pre.array()).exp()).inverse() - 0.5 * (target_stack.array() + 1.0)) / n;
    grad_H = d * pilot_stack.transpose() + 2.0 * lambda * H;
    grad_z = fold_bias(d);
}

double loss_loglik(const MatrixXd& X, const MatrixXd& targets, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("loss_loglik: sigma must be > 0");
    if (X.rows() != targets.rows() || X.cols() != targets.cols())
        throw std::invalid_argument("loss_loglik: shape mismatch");
    double sum = 0.0;
    for (Eigen::Index c = 0; c < X.cols(); ++c)
        for (Eigen::Index r = 0; r < X.rows(); ++r)
            sum += probit::log_norm_cdf(targets(r, c) * X(r, c) / sigma);
    return sum;
}

MatrixXd grad_loglik(const MatrixXd& X, const MatrixXd& targets, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("grad_loglik: sigma must be > 0");
    MatrixXd g(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            const double t = targets(r, c);
            g(r, c) = t * probit::norm_pdf_over_cdf(t * X(r, c) / sigma) / sigma;
        }
    }
    return g;
}

SgdResult sgd_train(const SgdProblem& problem, const EstimatorConfig& cfg, MatrixXd H0,
                    MatrixXd z0) {
    SgdResult res;
    res.H = std::move(H0);
    res.z = std::move(z0);
    res.trace.reason = TrainingTrace::Reason::EpochLimit;

    double alpha = cfg.learning_rate;
    double current = problem.loss(res.H, res.z);
    if (!std::isfinite(current)) {
        res.trace.reason = TrainingTrace::Reason::Aborted;
        return res;
    }

    MatrixXd grad_h, grad_z;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        problem.grad(res.H, res.z, grad_h, grad_z);
        const MatrixXd cand_h = res.H - alpha * grad_h;
        const MatrixXd cand_z = res.z.size() > 0 ? MatrixXd(res.z - alpha * grad_z) : res.z;
        const double cand = problem.loss(cand_h, cand_z);
        if (!std::isfinite(cand)) {
            res.trace.loss.push_back(current);
            res.trace.learning_rate.push_back(alpha);
            res.trace.reason = TrainingTrace::Reason::Aborted;
            return res;
        }
        if (cand <= current) {
            const double improvement = current - cand;
            res.H = cand_h;
            res.z = cand_z;
            current = cand;
            res.trace.loss.push_back(current);
            res.trace.learning_rate.push_back(alpha);
            if (improvement < cfg.stop_tolerance) {
                res.trace.reason = TrainingTrace::Reason::Converged;
                return res;
            }
        } else {
            alpha *= cfg.decay; // roll back and retry with a smaller step
            res.trace.loss.push_back(current);
            res.trace.learning_rate.push_back(alpha);
        }
    }
    return res;
}

VectorXd simplex_projection(const VectorXd& v, double budget) {
    if (!(budget > 0.0)) throw std::invalid_argument("simplex_projection: budget must be > 0");
    const Eigen::Index n = v.size();
    if (n == 0) throw std::invalid_argument("simplex_projection: empty vector");
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0, theta = 0.0;
    Eigen::Index rho = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumsum += u[static_cast<std::size_t>(k)];
        const double t = (cumsum - budget) / static_cast<double>(k + 1);
        if (u[static_cast<std::size_t>(k)] - t > 0.0) {
            rho = k;
            theta = t;
        }
    }
    return (v.array() - theta).cwiseMax(0.0);
}

namespace {

template <typename Matrix>
Matrix low_rank_project_impl(const Matrix& m, int rank, double budget) {
    if (rank < 1 || rank > std::min(m.rows(), m.cols()))
        throw std::invalid_argument("low_rank_project: rank out of range");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("low_rank_project: SVD failed to converge");
    const VectorXd w = simplex_projection(svd.singularValues().head(rank), budget);
    return svd.matrixU().leftCols(rank) * w.asDiagonal() *
           svd.matrixV().leftCols(rank).adjoint();
}

} // namespace

MatrixXd low_rank_project(const MatrixXd& m, int rank, double budget) {
    return low_rank_project_impl(m, rank, budget);
}

MatrixXcd low_rank_project(const MatrixXcd& m, int rank, double budget) {
    return low_rank_project_impl(m, rank, budget);
}

namespace {

ChannelEstimate train_realified(const frontend::ObservationBlock& obs,
                                const frontend::PilotMatrix& pilots, EstimatorConfig cfg) {
    cfg = resolve_config(cfg, obs, pilots);
    const MatrixXd pilot_stack = frontend::stack_realified_pilots(pilots.X);
    const MatrixXd target_stack = frontend::stack_realified_targets(obs.Y);
    const auto mr = obs.Y.rows();
    const auto mt2 = pilot_stack.rows();

    SgdProblem problem;
    const double lambda = cfg.regularization;
    if (cfg.algorithm == Algorithm::Lr) {
        problem.loss = [&](const MatrixXd& h, const MatrixXd& z) {
            return loss_bce(h, z, pilot_stack, target_stack, lambda);
        };
        problem.grad = [&](const MatrixXd& h, const MatrixXd& z, MatrixXd& gh, MatrixXd& gz) {
            grad_bce(h, z, pilot_stack, target_stack, lambda, gh, gz);
        };
    } else {
        problem.loss = [&](const MatrixXd& h, const MatrixXd& z) {
            return loss_ls(h, z, pilot_stack, target_stack, Activation::Tanh, lambda);
        };
        problem.grad = [&](const MatrixXd& h, const MatrixXd& z, MatrixXd& gh, MatrixXd& gz) {
            grad_ls(h, z, pilot_stack, target_stack, Activation::Tanh, lambda, gh, gz);
        };
    }

    SgdResult fit = sgd_train(problem, cfg, MatrixXd::Zero(mr, mt2), MatrixXd::Zero(mr, 2));

    ChannelEstimate out;
    out.H_hat = frontend::derealify_channel(fit.H);
    out.z_hat = frontend::derealify_samples(fit.z);
    out.trace = std::move(fit.trace);
    out.config = cfg;
    return out;
}

// Column n of the pilot matrix repeats block column n mod Mt, so the
// transformed block variable W (Mr x Mt) expands to the full M r x Np
// product H X by column lookup, and per-column gradients fold back by
// summation over the repeats.
std::vector<int> block_index(Eigen::Index n_p, Eigen::Index m_t) {
    std::vector<int> idx(static_cast<std::size_t>(n_p));
    for (Eigen::Index n = 0; n < n_p; ++n) idx[static_cast<std::size_t>(n)] = static_cast<int>(n % m_t);
    return idx;
}

MatrixXcd expand_blocks(const MatrixXcd& w, const std::vector<int>& idx) {
    MatrixXcd full(w.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t n = 0; n < idx.size(); ++n)
        full.col(static_cast<Eigen::Index>(n)) = w.col(idx[n]);
    return full;
}

double complex_loglik(const MatrixXcd& x, const MatrixXcd& y, double sigma) {
    return loss_loglik(x.real(), y.real(), sigma) + loss_loglik(x.imag(), y.imag(), sigma);
}

MatrixXcd complex_grad_loglik(const MatrixXcd& x, const MatrixXcd& y, double sigma) {
    MatrixXcd g(x.rows(), x.cols());
    g.real() = grad_loglik(x.real(), y.real(), sigma);
    g.imag() = grad_loglik(x.imag(), y.imag(), sigma);
    return g;
}

MatrixXcd fold_blocks(const MatrixXcd& full, const std::vector<int>& idx, Eigen::Index m_t) {
    MatrixXcd w = MatrixXcd::Zero(full.rows(), m_t);
    for (std::size_t n = 0; n < idx.size(); ++n)
        w.col(idx[n]) += full.col(static_cast<Eigen::Index>(n));
    return w;
}

} // namespace

double default_pga_budget(const frontend::ObservationBlock& obs,
                          const frontend::PilotMatrix& pilots, double sigma) {
    const Eigen::Index m_t = pilots.X.rows();
    MatrixXcd w0 = MatrixXcd::Zero(obs.Y.rows(), m_t);
    VectorXd counts = VectorXd::Zero(m_t);
    for (Eigen::Index n = 0; n < obs.Y.cols(); ++n) {
        w0.col(n % m_t) += obs.Y.col(n);
        counts(n % m_t) += 1.0;
    }
    for (Eigen::Index j = 0; j < m_t; ++j)
        if (counts(j) > 0.0) w0.col(j) /= counts(j);
    Eigen::JacobiSVD<MatrixXcd> svd(w0);
    return sigma * svd.singularValues().sum();
}

ChannelEstimate train_logistic_regression(const frontend::ObservationBlock& obs,
                                          const frontend::PilotMatrix& pilots,
                                          EstimatorConfig cfg) {
    cfg.algorithm = Algorithm::Lr;
    return train_realified(obs, pilots, cfg);
}

ChannelEstimate train_nn_ce(const frontend::ObservationBlock& obs,
                            const frontend::PilotMatrix& pilots, EstimatorConfig cfg) {
    cfg.algorithm = Algorithm::Nn;
    return train_realified(obs, pilots, cfg);
}

ChannelEstimate train_pga(const frontend::ObservationBlock& obs,
                          const frontend::PilotMatrix& pilots, EstimatorConfig cfg) {
    cfg.algorithm = Algorithm::Pga;
    cfg = resolve_config(cfg, obs, pilots);
    const double sigma = cfg.noise_std;
    if (cfg.budget == 0.0) cfg.budget = default_pga_budget(obs, pilots, sigma);
    if (!(cfg.budget > 0.0)) throw std::invalid_argument("train_pga: budget must be > 0");

    const auto idx = block_index(pilots.X.cols(), pilots.X.rows());
    MatrixXcd w = MatrixXcd::Zero(obs.Y.rows(), pilots.X.rows());
    double alpha = cfg.learning_rate;
    double current = complex_loglik(expand_blocks(w, idx), obs.Y, sigma);

    ChannelEstimate out;
    out.trace.reason = TrainingTrace::Reason::EpochLimit;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const MatrixXcd grad = fold_blocks(
            complex_grad_loglik(expand_blocks(w, idx), obs.Y, sigma), idx, w.cols());
        const MatrixXcd cand = low_rank_project(MatrixXcd(w + alpha * grad), cfg.rank, cfg.budget);
        const double cand_obj = complex_loglik(expand_blocks(cand, idx), obs.Y, sigma);
        if (!std::isfinite(cand_obj)) {
            out.trace.loss.push_back(current);
            out.trace.learning_rate.push_back(alpha);
            out.trace.reason = TrainingTrace::Reason::Aborted;
            break;
        }
        if (cand_obj >= current) {
            const double improvement = cand_obj - current;
            w = cand;
            current = cand_obj;
            out.trace.loss.push_back(current);
            out.trace.learning_rate.push_back(alpha);
            if (improvement < cfg.stop_tolerance) {
                out.trace.reason = TrainingTrace::Reason::Converged;
                break;
            }
        } else {
            alpha *= cfg.decay;
            out.trace.loss.push_back(current);
            out.trace.learning_rate.push_back(alpha);
        }
    }
    out.H_hat = recover_channel(expand_blocks(w, idx), pilots);
    out.config = cfg;
    return out;
}

ChannelEstimate train_frank_wolfe(const frontend::ObservationBlock& obs,
                                  const frontend::PilotMatrix& pilots, EstimatorConfig cfg) {
    cfg.algorithm = Algorithm::Fw;
    cfg = resolve_config(cfg, obs, pilots);
    const double sigma = cfg.noise_std;
    if (cfg.budget == 0.0) cfg.budget = default_pga_budget(obs, pilots, sigma);
    if (!(cfg.budget > 0.0)) throw std::invalid_argument("train_frank_wolfe: budget must be > 0");

    const auto idx = block_index(pilots.X.cols(), pilots.X.rows());
    MatrixXcd w = MatrixXcd::Zero(obs.Y.rows(), pilots.X.rows());
    double current = complex_loglik(expand_blocks(w, idx), obs.Y, sigma);
    double step_scale = 1.0;
    int accepted = 0;

    ChannelEstimate out;
    out.trace.reason = TrainingTrace::Reason::EpochLimit;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const MatrixXcd grad = fold_blocks(
            complex_grad_loglik(expand_blocks(w, idx), obs.Y, sigma), idx, w.cols());
        Eigen::JacobiSVD<MatrixXcd> svd(grad, Eigen::ComputeThinU | Eigen::ComputeThinV);
        // linear maximizer over the nuclear-norm ball: one rank-1 atom
        const MatrixXcd atom =
            cfg.budget * (svd.matrixU().col(0) * svd.matrixV().col(0).adjoint());
        const double gamma = std::min(1.0, step_scale * 2.0 / (accepted + 2.0));
        const MatrixXcd cand = (1.0 - gamma) * w + gamma * atom;
        const double cand_obj = complex_loglik(expand_blocks(cand, idx), obs.Y, sigma);
        if (!std::isfinite(cand_obj)) {
            out.trace.loss.push_back(current);
            out.trace.learning_rate.push_back(gamma);
            out.trace.reason = TrainingTrace::Reason::Aborted;
            break;
        }
        if (cand_obj >= current) {
            const double improvement = cand_obj - current;
            w = cand;
            current = cand_obj;
            ++accepted;
            out.trace.loss.push_back(current);
            out.trace.learning_rate.push_back(gamma);
            if (improvement < cfg.stop_tolerance) {
                out.trace.reason = TrainingTrace::Reason::Converged;
                break;
            }
        } else {
            step_scale *= cfg.decay;
            out.trace.loss.push_back(current);
            out.trace.learning_rate.push_back(gamma);
        }
    }
    out.H_hat = recover_channel(expand_blocks(w, idx), pilots);
    out.config = cfg;
    return out;
}

Eigen::MatrixXcd recover_channel(const MatrixXcd& x_hat, const frontend::PilotMatrix& pilots) {
    if (x_hat.cols() != pilots.X.cols())
        throw std::invalid_argument("recover_channel: estimate/pilot dimension mismatch");
    Eigen::JacobiSVD<MatrixXcd> svd(pilots.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd s = svd.singularValues();
    const double tol = std::max(pilots.X.rows(), pilots.X.cols()) * s(0) * 1e-12;
    if (!(s(s.size() - 1) > tol))
        throw std::runtime_error("recover_channel: pilot matrix is rank deficient");
    // X^+ = V S^-1 U^*
    return x_hat * (svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint());
}

ChannelEstimate estimate(const frontend::ObservationBlock& obs,
                         const frontend::PilotMatrix& pilots, const EstimatorConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::Lr: return train_logistic_regression(obs, pilots, cfg);
        case Algorithm::Nn: return train_nn_ce(obs, pilots, cfg);
        case Algorithm::Pga: return train_pga(obs, pilots, cfg);
        case Algorithm::Fw: return train_frank_wolfe(obs, pilots, cfg);
    }
    throw std::invalid_argument("estimate: unknown algorithm");
}

} // namespace thzce::estimators
