#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wabc/param_space.hpp"
#include "wabc/random.hpp"
#include "wabc/series.hpp"
#include "wabc/types.hpp"

namespace wabc {

// A simulator-defined model.  simulate returns an n x d_out matrix whose rows
// are either exchangeable observations (is_series == false) or a time-ordered
// path (is_series == true).  loglik is only set for tractable models.
struct GenerativeModel {
  std::string name;
  ParamSpace space;
  bool is_series = false;
  int out_dim = 1;
  EmbeddingSpec default_embedding;

  std::function<Matrix(const Vector& theta, Eigen::Index n, RandomStream& rng)> simulate;
  std::function<Vector(RandomStream& rng)> prior_sample;
  std::function<double(const Vector& theta)> prior_logdensity;
  std::function<double(const Vector& theta, const Matrix& data)> loglik;  // optional

  bool has_loglik() const { return static_cast<bool>(loglik); }
};

// --- Normal location -------------------------------------------------------
// y_i ~ N(theta, S) in R^2 with S = [[1, .5], [.5, 1]]; prior theta_j ~ N(0, 25).
GenerativeModel make_normal_location_model();

struct GaussianPosterior {
  Vector mean;
  Matrix cov;
};
// Conjugate posterior of the location given the data.
GaussianPosterior normal_location_posterior(const Matrix& data);

// --- g-and-k ----------------------------------------------------------------
// Quantile function with theta = (a, b, g, k); prior U[0, 10]^4.
double gandk_quantile(double r, const Vector& theta);
// Quantile evaluated at a standard Normal deviate z (simulation path).
double gandk_from_normal(double z, const Vector& theta);
GenerativeModel make_gandk_model();
// Numeric log-density: inverts the quantile function by bisection to
// |Q(r) - y| <= 1e-10, then log f = -log dQ/dr at the root.
double gandk_logpdf(double y, const Vector& theta);

// Bivariate extension: theta = (a1, b1, g1, k1, a2, b2, g2, k2, rho); a
// correlated standard Normal pair is pushed through each marginal quantile.
GenerativeModel make_bivariate_gandk_model();

// --- Toggle switch ----------------------------------------------------------
// theta = (alpha1, alpha2, beta1, beta2, mu, sigma, gamma).
GenerativeModel make_toggle_switch_model(int horizon = 300);
// Single-cell terminal u_T; noise_scale 0 gives the deterministic recursion.
double toggle_switch_terminal_u(const Vector& theta, int horizon,
                                double noise_scale, RandomStream& rng);

// --- M/G/1 queue ------------------------------------------------------------
// theta = (theta1, theta2 - theta1, theta3): service U[theta1, theta2],
// arrivals Exp(theta3); observed inter-departure times.
Vector mg1_recursion(const Vector& service, const Vector& arrival_gaps);
GenerativeModel make_mg1_model(double theta1_upper = 10.0);

// --- AR(1) ------------------------------------------------------------------
// theta = (phi, log sigma); stationary initialization.
GenerativeModel make_ar1_model();
double ar1_loglik(const Vector& theta, const Matrix& series);

// --- Cosine trend -----------------------------------------------------------
// y_t = A cos(2 pi omega t + phi) + sigma w_t; theta = (omega, phi, log sigma, log A).
GenerativeModel make_cosine_model();
double cosine_loglik(const Vector& theta, const Matrix& series);

// --- Levy-driven stochastic volatility ---------------------------------------
// theta = (mu, beta, xi, omega2, lambda); returns y_1..y_n.
GenerativeModel make_levy_sv_model();
// One latent step: decays z over a unit interval with the supplied jumps and
// returns (z_next, integrated variance v).
void levy_sv_transition(double z, double lambda, const std::vector<double>& jump_times,
                        const std::vector<double>& jump_sizes, double t0,
                        double* z_next, double* v_next);

// Sum of the first n_lags autocorrelations of the squared series.
double acf_summary(const Matrix& series, int n_lags = 50);

// --- Registry ---------------------------------------------------------------
const GenerativeModel& model_registry(const std::string& name);
std::vector<std::string> model_names();

}  // namespace wabc
