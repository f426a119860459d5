#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lra/geometry.hpp"
#include "lra/kernel_tables.hpp"
#include "lra/noise.hpp"
#include "lra/variance_field.hpp"

namespace lra {

struct PredictedCovariance {
  Vec2 x0;
  std::vector<Vec2> offsets;
  Eigen::MatrixXd matrix;
  double c0 = 0.0;
  int nodes = 0;
  double quadrature_error = 0.0;  // max |C_n - C_{n/2}| over entries
};

inline constexpr int kDefaultQuadratureNodes = 4096;

// (kappa / 4 pi)^2 * integral over [0, 2 pi) of sigma^2(alpha, alpha . x0) (phi' * phi')(alpha . v)
double predicted_cov_scalar(Vec2 v, Vec2 x0, const VarianceField& field, const Autocorrelation& ac, double kappa,
                            int nodes = kDefaultQuadratureNodes);
PredictedCovariance predicted_cov_matrix(const LocalPatch& patch, const VarianceField& field, const Autocorrelation& ac,
                                         double kappa, int nodes = kDefaultQuadratureNodes);
// integral over [0, 2 pi) of sigma^2(alpha, alpha . x0)
double sigma2_trajectory_integral(Vec2 x0, const VarianceField& field, int nodes = kDefaultQuadratureNodes);
// min eigenvalue >= -rel_tol * max eigenvalue
bool is_psd(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

inline constexpr int kDefaultLatticeTruncation = 200;

struct LatticeSumProbe {
  double a = 0.0;
  double b = 0.0;
  double psi_value = 0.0;  // sum over |j| <= J of H phi'(a - j + b)^2
  double Psi_value = 0.0;  // same with |.|^3
  int J = 0;
  double psi_tail_bound = 0.0;
  double Psi_tail_bound = 0.0;
};

LatticeSumProbe psi_sum(double a, double b, const FilteredKernelTable& fk, int J = kDefaultLatticeTruncation);
double big_psi_sum(double a, double b, const FilteredKernelTable& fk, int J = kDefaultLatticeTruncation);

// dalpha * sum_k psi(a_k, alpha_k . chx) sigma^2(alpha_k, alpha_k . x0)
double d_epsilon(const GridSpec& grid, Vec2 x0, Vec2 chx, const VarianceField& field, const FilteredKernelTable& fk,
                 int J = kDefaultLatticeTruncation);
// C * integral sigma^2(alpha, alpha . x0), C the Parseval constant
double d_epsilon_limit(Vec2 x0, const VarianceField& field, double parseval_constant,
                       int nodes = kDefaultQuadratureNodes);

// sum |w|^3 E|eta|^3 / (sum w^2 E eta^2)^{3/2} over the finite detector.
double lyapunov_ratio(const GridSpec& grid, Vec2 x0, Vec2 chx, const VarianceField& field,
                      const FilteredKernelTable& fk, Distribution d);
double lyapunov_ratio_multi(const GridSpec& grid, Vec2 x0, const std::vector<Vec2>& offsets,
                            const std::vector<double>& theta, const VarianceField& field,
                            const FilteredKernelTable& fk, Distribution d);

struct SecondMoment {
  double exact = 0.0;   // variance sigma^2(alpha_k, p_j)
  double frozen = 0.0;  // variance sigma^2(alpha_k, alpha_k . x0)
};

// E (theta . N_rec)^2 over the finite detector.
SecondMoment second_moment_multi(const GridSpec& grid, Vec2 x0, const std::vector<Vec2>& offsets,
                                 const std::vector<double>& theta, const VarianceField& field,
                                 const FilteredKernelTable& fk);
// Exact covariance matrix of the finite-epsilon reconstruction.
Eigen::MatrixXd discrete_covariance(const GridSpec& grid, Vec2 x0, const std::vector<Vec2>& offsets,
                                    const VarianceField& field, const FilteredKernelTable& fk, double window = 0.0);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
};
// least squares of log y against log x
PowerFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lra
