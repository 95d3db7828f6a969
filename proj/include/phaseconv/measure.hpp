#pragma once

// Forward model for phaseless Fourier measurements of a circular convolution
// w ⊛ x with w = B h and x = C m. Everything downstream works over real
// symmetric matrices: a complex sensing row a is carried as the pair
// (Re a, Im a), for which a* X a = Re(a)ᵀ X Re(a) + Im(a)ᵀ X Im(a).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "phaseconv/types.hpp"

namespace phaseconv {

enum class SubspaceMode {
  GaussianRows,      // b_ℓ ~ N(0, I_k/m), c_ℓ ~ N(0, I_n/m), real rows
  FourierIdentityB,  // B = equispaced identity columns, C Gaussian; rows of √m·F·B, √m·F·C
  FourierGaussian,   // B and C Gaussian in time; rows of √m·F·B, √m·F·C
};

std::string_view to_string(SubspaceMode mode);
SubspaceMode subspace_mode_from_string(std::string_view name);

/// Rank ≤ 2 quadratic form X ↦ g₁ᵀXg₁ + g₂ᵀXg₂. `g2` is empty for a real row.
struct SensingFunctional {
  Vec g1;
  Vec g2;

  static SensingFunctional from_real(Vec row);
  static SensingFunctional from_complex(Vec re, Vec im);

  Eigen::Index dim() const { return g1.size(); }
  bool is_complex() const { return g2.size() != 0; }

  /// Q(X) for a dense symmetric X.
  double apply(const Mat& X) const;
  /// Q(V Vᵀ) = Σ_g ‖Vᵀg‖² without forming V Vᵀ.
  double apply_factor(const Mat& V) const;
};

/// All m functionals of one signal, stored as stacked generator rows.
/// Row ℓ of `re` (and of `im`, when complex) is the ℓ-th generator pair.
class FunctionalFamily {
 public:
  FunctionalFamily() = default;
  explicit FunctionalFamily(Mat re, Mat im = Mat());

  Eigen::Index size() const { return re_.rows(); }
  Eigen::Index dim() const { return re_.cols(); }
  bool is_complex() const { return im_.size() != 0; }
  const Mat& re() const { return re_; }
  const Mat& im() const { return im_; }

  SensingFunctional functional(Eigen::Index l) const;

  /// (Q_ℓ(V Vᵀ))_ℓ.
  Vec apply_factor(const Mat& V) const;
  /// (Q_ℓ(X))_ℓ for dense symmetric X.
  Vec apply(const Mat& X) const;
  /// Σ_ℓ w_ℓ Σ_g g gᵀ V, via two thin products per generator set.
  Mat adjoint_times(const Vec& weights, const Mat& V) const;
  /// Σ_ℓ w_ℓ Σ_g g gᵀ as a dense d×d matrix (for oracles and small problems).
  Mat adjoint_dense(const Vec& weights) const;

  FunctionalFamily scaled(double s) const;

 private:
  Mat re_;
  Mat im_;
};

struct ProblemInstance {
  int m = 0;
  int k = 0;
  int n = 0;
  Vec h_true;
  Vec m_true;
  SubspaceMode subspace_mode = SubspaceMode::GaussianRows;
  FunctionalFamily b_rows;
  FunctionalFamily c_rows;
  /// Time-domain subspace bases (m×k, m×n). Empty in GaussianRows mode,
  /// where the rows themselves are the sensing model.
  Mat basis_b;
  Mat basis_c;
  std::uint64_t seed = 0;
  std::string generator_id;

  bool has_time_domain() const { return basis_b.size() != 0; }
  void validate() const;
};

struct MeasurementSet {
  Vec y;
  Vec delta;  // m·y²
  std::optional<Vec> xi;

  Eigen::Index size() const { return y.size(); }
  static MeasurementSet from_magnitudes(Vec y);
};

/// Identifier of the random stream used by gen_instance.
std::string_view generator_id();

/// z[t] = Σ_s w[s]·x[(t−s) mod m], O(m²).
Vec circular_convolve_direct(const Vec& w, const Vec& x);
/// Same result through the DFT convolution theorem.
Vec circular_convolve_fft(const Vec& w, const Vec& x);
inline Vec circular_convolve(const Vec& w, const Vec& x) { return circular_convolve_fft(w, x); }

/// Unitary DFT magnitudes |F z| with F[ω,t] = e^{−2πiωt/m}/√m (0-based).
Vec fourier_magnitudes(const Vec& z);

ProblemInstance gen_instance(int m, int k, int n, SubspaceMode mode, std::uint64_t seed);

/// Replaces the ground-truth signals, keeping the sensing model.
ProblemInstance with_signals(const ProblemInstance& inst, Vec h, Vec m);

/// y_ℓ = √(Q_bℓ(h hᵀ)·Q_cℓ(m mᵀ)/m), from the sensing rows.
MeasurementSet forward_measure(const ProblemInstance& inst);

/// |F (B h ⊛ C m)| through time-domain convolution. Fourier modes only.
Vec forward_measure_convolution(const ProblemInstance& inst);

/// y'_ℓ = y_ℓ (1 + ξ_ℓ); throws NoiseModelError if any ξ_ℓ < −1.
MeasurementSet add_noise(const MeasurementSet& meas, const Vec& xi);

/// Q_b(H)·Q_c(M) (the δ-scaled lifted measurement; divide by m for ỹ²).
double lifted_value(const SensingFunctional& qb, const Mat& H, const SensingFunctional& qc,
                    const Mat& M);

}  // namespace phaseconv
