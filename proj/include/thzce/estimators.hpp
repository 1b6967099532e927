// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the thzce authors

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thzce/frontend.hpp"

namespace thzce::estimators {

enum class Algorithm { Lr, Nn, Pga, Fw };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm);

enum class Activation { Linear, Tanh };

struct EstimatorConfig {
    Algorithm algorithm = Algorithm::Nn;
    int epochs = 100;
    // 0 selects the per-algorithm default: 0.01 for LR/NN, 1/Np for PGA/FW.
    double learning_rate = 0.0;
    // 0 selects the per-algorithm default: 0.7 for LR/NN, 0.5 for PGA/FW.
    double decay = 0.0;
    double stop_tolerance = 1e-10;
    double regularization = 1e-3; // lambda, LR/NN only
    // 0 lets the caller (bench) supply the simulated ray count.
    int rank = 0;
    // 0 selects the data-driven default (see default_pga_budget).
    double budget = 0.0;
    // 0 selects sqrt(N0/2) from the observation block.
    double noise_std = 0.0;
};

struct TrainingTrace {
    std::vector<double> loss;          // objective after each epoch
    std::vector<double> learning_rate; // step size after each epoch
    enum class Reason { Converged, EpochLimit, Aborted };
    Reason reason = Reason::EpochLimit;
};

struct ChannelEstimate {
    Eigen::MatrixXcd H_hat;
    Eigen::VectorXcd z_hat; // noise/bias estimate (LR/NN only, else empty)
    TrainingTrace trace;
    EstimatorConfig config; // resolved values actually used
};

// ---- losses over the realified system -----------------------------------
// Pilot/target stacks are the layouts produced by stack_realified_pilots /
// stack_realified_targets; H is Mr x 2Mt, z is Mr x 2.

// (1/N) sum_n || y_n - f(H x_n + z) ||_F^2 + lambda ||H||_F^2
double loss_ls(const Eigen::MatrixXd& H, const Eigen::MatrixXd& z,
               const Eigen::MatrixXd& pilot_stack, const Eigen::MatrixXd& target_stack,
               Activation activation, double lambda);

void grad_ls(const Eigen::MatrixXd& H, const Eigen::MatrixXd& z,
             const Eigen::MatrixXd& pilot_stack, const Eigen::MatrixXd& target_stack,
             Activation activation, double lambda,
             Eigen::MatrixXd& grad_H, Eigen::MatrixXd& grad_z);

// Binary cross-entropy on targets mapped {-1,+1} -> {0,1}, same layout.
double loss_bce(const Eigen::MatrixXd& H, const Eigen::MatrixXd& z,
                const Eigen::MatrixXd& pilot_stack, const Eigen::MatrixXd& target_stack,
                double lambda);

void grad_bce(const Eigen::MatrixXd& H, const Eigen::MatrixXd& z,
              const Eigen::MatrixXd& pilot_stack, const Eigen::MatrixXd& target_stack,
              double lambda, Eigen::MatrixXd& grad_H, Eigen::MatrixXd& grad_z);

// One-bit log-likelihood sum_ij log Phi(t_ij X_ij / sigma) for targets
// t in {-1,+1}; the trainers ascend this objective.
double loss_loglik(const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets, double sigma);

Eigen::MatrixXd grad_loglik(const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets,
                            double sigma);

// ---- scheduled full-gradient descent -------------------------------------
struct SgdProblem {
    std::function<double(const Eigen::MatrixXd&, const Eigen::MatrixXd&)> loss;
    std::function<void(const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                       Eigen::MatrixXd&, Eigen::MatrixXd&)>
        grad;
};

struct SgdResult {
    Eigen::MatrixXd H;
    Eigen::MatrixXd z;
    TrainingTrace trace;
};

// Runs at most cfg.epochs steps H <- H - alpha grad. A step that fails to
// improve the loss is rolled back and alpha is multiplied by the decay
// factor; an accepted step that improves by less than the stop tolerance
// terminates with reason Converged. Non-finite losses abort.
SgdResult sgd_train(const SgdProblem& problem, const EstimatorConfig& cfg,
                    Eigen::MatrixXd H0, Eigen::MatrixXd z0);

// ---- projections ----------------------------------------------------------

// Euclidean projection onto { w : w_i >= 0, sum w_i = budget }
// (sort-and-threshold).
Eigen::VectorXd simplex_projection(const Eigen::VectorXd& v, double budget);

// SVD, keep the top `rank` triplets, project the kept singular values onto
// the budget simplex, reconstruct. Output has rank <= rank and nuclear norm
// exactly equal to the budget.
Eigen::MatrixXd low_rank_project(const Eigen::MatrixXd& M, int rank, double budget);
Eigen::MatrixXcd low_rank_project(const Eigen::MatrixXcd& M, int rank, double budget);

// ---- estimation algorithms -----------------------------------------------

ChannelEstimate train_logistic_regression(const frontend::ObservationBlock& obs,
                                          const frontend::PilotMatrix& pilots,
                                          EstimatorConfig cfg);

ChannelEstimate train_nn_ce(const frontend::ObservationBlock& obs,
                            const frontend::PilotMatrix& pilots, EstimatorConfig cfg);

ChannelEstimate train_pga(const frontend::ObservationBlock& obs,
                          const frontend::PilotMatrix& pilots, EstimatorConfig cfg);

ChannelEstimate train_frank_wolfe(const frontend::ObservationBlock& obs,
                                  const frontend::PilotMatrix& pilots, EstimatorConfig cfg);

// Least-squares right inverse, H_hat = X_hat X^+; requires full row rank.
Eigen::MatrixXcd recover_channel(const Eigen::MatrixXcd& X_hat,
                                 const frontend::PilotMatrix& pilots);

// Nuclear norm of the scale-matched block-folded observation average,
// sigma * mean over pilot repeats of Y; the default nuclear budget.
double default_pga_budget(const frontend::ObservationBlock& obs,
                          const frontend::PilotMatrix& pilots, double sigma);

// Dispatch on cfg.algorithm.
ChannelEstimate estimate(const frontend::ObservationBlock& obs,
                         const frontend::PilotMatrix& pilots, const EstimatorConfig& cfg);

} // namespace thzce::estimators
