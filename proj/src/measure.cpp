#include "phaseconv/measure.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace phaseconv {

namespace {

using CVec = Eigen::VectorXcd;

CVec fft(const Vec& x) {
  // Eigen's real-input transform does not handle length 1.
  if (x.size() == 1) return x.cast<std::complex<double>>();
  Eigen::FFT<double> engine;
  std::vector<double> in(x.data(), x.data() + x.size());
  std::vector<std::complex<double>> out;
  engine.fwd(out, in);
  return Eigen::Map<CVec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Vec ifft_real(const CVec& X) {
  if (X.size() == 1) return X.real();
  Eigen::FFT<double> engine;
  // Complex-to-complex inverse: the real-output path only handles even sizes.
  std::vector<std::complex<double>> in(X.data(), X.data() + X.size());
  std::vector<std::complex<double>> out;
  engine.inv(out, in);
  return Eigen::Map<CVec>(out.data(), static_cast<Eigen::Index>(out.size())).real();
}

// Columns of √m·F·basis, i.e. the unnormalized DFT of each basis column.
void fourier_rows(const Mat& basis, Mat& re, Mat& im) {
  re.resize(basis.rows(), basis.cols());
  im.resize(basis.rows(), basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const CVec col = fft(basis.col(j));
    re.col(j) = col.real();
    im.col(j) = col.imag();
  }
}

Mat gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  Mat out(rows, cols);
  // Row-major fill, so row ℓ is drawn before row ℓ+1.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  return out;
}

}  // namespace

std::string_view to_string(SubspaceMode mode) {
  switch (mode) {
    case SubspaceMode::GaussianRows: return "GaussianRows";
    case SubspaceMode::FourierIdentityB: return "FourierIdentityB";
    case SubspaceMode::FourierGaussian: return "FourierGaussian";
  }
  return "GaussianRows";
}

SubspaceMode subspace_mode_from_string(std::string_view name) {
  if (name == "GaussianRows") return SubspaceMode::GaussianRows;
  if (name == "FourierIdentityB") return SubspaceMode::FourierIdentityB;
  if (name == "FourierGaussian") return SubspaceMode::FourierGaussian;
  throw ParseError("subspace_mode", "unknown mode '" + std::string(name) + "'");
}

SensingFunctional SensingFunctional::from_real(Vec row) { return {std::move(row), Vec()}; }

SensingFunctional SensingFunctional::from_complex(Vec re, Vec im) {
  require_dims(re.size() == im.size(), "complex functional: Re/Im length mismatch");
  return {std::move(re), std::move(im)};
}

double SensingFunctional::apply(const Mat& X) const {
  require_dims(X.rows() == dim() && X.cols() == dim(), "functional dimension mismatch");
  double v = g1.dot(X * g1);
  if (is_complex()) v += g2.dot(X * g2);
  return v;
}

double SensingFunctional::apply_factor(const Mat& V) const {
  require_dims(V.rows() == dim(), "functional dimension mismatch");
  double v = (V.transpose() * g1).squaredNorm();
  if (is_complex()) v += (V.transpose() * g2).squaredNorm();
  return v;
}

FunctionalFamily::FunctionalFamily(Mat re, Mat im) : re_(std::move(re)), im_(std::move(im)) {
  if (im_.size() != 0)
    require_dims(im_.rows() == re_.rows() && im_.cols() == re_.cols(),
                 "functional family: Re/Im shape mismatch");
}

SensingFunctional FunctionalFamily::functional(Eigen::Index l) const {
  if (is_complex()) return SensingFunctional::from_complex(re_.row(l).transpose(), im_.row(l).transpose());
  return SensingFunctional::from_real(re_.row(l).transpose());
}

Vec FunctionalFamily::apply_factor(const Mat& V) const {
  require_dims(V.rows() == dim(), "functional family: factor has wrong row count");
  Vec q = (re_ * V).rowwise().squaredNorm();
  if (is_complex()) q += (im_ * V).rowwise().squaredNorm();
  return q;
}

Vec FunctionalFamily::apply(const Mat& X) const {
  require_dims(X.rows() == dim() && X.cols() == dim(), "functional family: matrix dimension mismatch");
  Vec q = (re_ * X).cwiseProduct(re_).rowwise().sum();
  if (is_complex()) q += (im_ * X).cwiseProduct(im_).rowwise().sum();
  return q;
}

Mat FunctionalFamily::adjoint_times(const Vec& weights, const Mat& V) const {
  require_dims(weights.size() == size(), "functional family: weight length mismatch");
  require_dims(V.rows() == dim(), "functional family: factor has wrong row count");
  Mat out = re_.transpose() * (weights.asDiagonal() * (re_ * V));
  if (is_complex()) out.noalias() += im_.transpose() * (weights.asDiagonal() * (im_ * V));
  return out;
}

Mat FunctionalFamily::adjoint_dense(const Vec& weights) const {
  require_dims(weights.size() == size(), "functional family: weight length mismatch");
  Mat out = re_.transpose() * weights.asDiagonal() * re_;
  if (is_complex()) out.noalias() += im_.transpose() * weights.asDiagonal() * im_;
  return out;
}

FunctionalFamily FunctionalFamily::scaled(double s) const {
  if (is_complex()) return FunctionalFamily(s * re_, s * im_);
  return FunctionalFamily(s * re_);
}

void ProblemInstance::validate() const {
  if (m < 1 || k < 1 || n < 1) throw DimensionError("instance dimensions must be positive");
  if (k > m || n > m) throw DimensionError("instance requires k <= m and n <= m");
  require_dims(h_true.size() == k && m_true.size() == n, "instance signal length mismatch");
  require_dims(b_rows.size() == m && b_rows.dim() == k, "instance b_rows shape mismatch");
  require_dims(c_rows.size() == m && c_rows.dim() == n, "instance c_rows shape mismatch");
  if (has_time_domain())
    require_dims(basis_b.rows() == m && basis_b.cols() == k && basis_c.rows() == m &&
                     basis_c.cols() == n,
                 "instance basis shape mismatch");
}

MeasurementSet MeasurementSet::from_magnitudes(Vec y) {
  MeasurementSet out;
  const double m = static_cast<double>(y.size());
  out.delta = m * y.array().square();
  out.y = std::move(y);
  return out;
}

std::string_view generator_id() { return "std::mt19937_64/std::normal_distribution"; }

Vec circular_convolve_direct(const Vec& w, const Vec& x) {
  require_dims(w.size() == x.size() && w.size() >= 1, "circular_convolve: length mismatch");
  const Eigen::Index m = w.size();
  Vec z = Vec::Zero(m);
  for (Eigen::Index t = 0; t < m; ++t)
    for (Eigen::Index s = 0; s < m; ++s) z[t] += w[s] * x[((t - s) % m + m) % m];
  return z;
}

Vec circular_convolve_fft(const Vec& w, const Vec& x) {
  require_dims(w.size() == x.size() && w.size() >= 1, "circular_convolve: length mismatch");
  const CVec W = fft(w);
  const CVec X = fft(x);
  return ifft_real(W.cwiseProduct(X));
}

Vec fourier_magnitudes(const Vec& z) {
  return fft(z).cwiseAbs() / std::sqrt(static_cast<double>(z.size()));
}

ProblemInstance gen_instance(int m, int k, int n, SubspaceMode mode, std::uint64_t seed) {
  if (m < 1 || k < 1 || n < 1) throw DimensionError("gen_instance: dimensions must be positive");
  if (k > m || n > m) throw DimensionError("gen_instance: requires k <= m and n <= m");

  ProblemInstance inst;
  inst.m = m;
  inst.k = k;
  inst.n = n;
  inst.subspace_mode = mode;
  inst.seed = seed;
  inst.generator_id = std::string(generator_id());

  std::mt19937_64 rng(seed);
  const double row_std = 1.0 / std::sqrt(static_cast<double>(m));

  switch (mode) {
    case SubspaceMode::GaussianRows: {
      Mat b = gaussian(rng, m, k, row_std);
      Mat c = gaussian(rng, m, n, row_std);
      inst.b_rows = FunctionalFamily(std::move(b));
      inst.c_rows = FunctionalFamily(std::move(c));
      break;
    }
    case SubspaceMode::FourierIdentityB:
    case SubspaceMode::FourierGaussian: {
      if (mode == SubspaceMode::FourierIdentityB) {
        inst.basis_b = Mat::Zero(m, k);
        for (int j = 0; j < k; ++j)
          inst.basis_b(static_cast<Eigen::Index>((static_cast<long long>(j) * m) / k), j) = 1.0;
      } else {
        inst.basis_b = gaussian(rng, m, k, row_std);
      }
      inst.basis_c = gaussian(rng, m, n, row_std);
      Mat re, im;
      fourier_rows(inst.basis_b, re, im);
      inst.b_rows = FunctionalFamily(re, im);
      fourier_rows(inst.basis_c, re, im);
      inst.c_rows = FunctionalFamily(re, im);
      break;
    }
  }

  inst.h_true = gaussian(rng, k, 1, 1.0);
  inst.m_true = gaussian(rng, n, 1, 1.0);
  return inst;
}

ProblemInstance with_signals(const ProblemInstance& inst, Vec h, Vec m) {
  require_dims(h.size() == inst.k && m.size() == inst.n, "with_signals: signal length mismatch");
  ProblemInstance out = inst;
  out.h_true = std::move(h);
  out.m_true = std::move(m);
  return out;
}

MeasurementSet forward_measure(const ProblemInstance& inst) {
  inst.validate();
  const Vec qb = inst.b_rows.apply_factor(inst.h_true);
  const Vec qc = inst.c_rows.apply_factor(inst.m_true);
  const double m = static_cast<double>(inst.m);
  Vec y = (qb.cwiseProduct(qc) / m).cwiseSqrt();
  return MeasurementSet::from_magnitudes(std::move(y));
}

Vec forward_measure_convolution(const ProblemInstance& inst) {
  inst.validate();
  if (!inst.has_time_domain())
    throw DomainError("forward_measure_convolution: instance has no time-domain subspaces");
  const Vec w = inst.basis_b * inst.h_true;
  const Vec x = inst.basis_c * inst.m_true;
  return fourier_magnitudes(circular_convolve_fft(w, x));
}

MeasurementSet add_noise(const MeasurementSet& meas, const Vec& xi) {
  require_dims(xi.size() == meas.size(), "add_noise: noise length mismatch");
  for (Eigen::Index l = 0; l < xi.size(); ++l)
    if (!(xi[l] >= -1.0))
      throw NoiseModelError("add_noise: xi[" + std::to_string(l) + "] < -1");
  MeasurementSet out = MeasurementSet::from_magnitudes(meas.y.cwiseProduct((1.0 + xi.array()).matrix()));
  out.xi = xi;
  return out;
}

double lifted_value(const SensingFunctional& qb, const Mat& H, const SensingFunctional& qc,
                    const Mat& M) {
  return qb.apply(H) * qc.apply(M);
}

}  // namespace phaseconv
