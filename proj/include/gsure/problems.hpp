#pragma once

#include <cstdint>
#include <string>

#include "gsure/common.hpp"
#include "gsure/rng.hpp"

namespace gsure {

/// Donoho-Johnstone test signals Blocks, Bumps, HeaviSine, Doppler sampled
/// at t_i = i/n (i = 1..n) and rescaled to sample standard deviation 7.
/// n must be a power of two.
Vector dj_signal(const std::string& name, int n);

struct TestProblem {
  std::string name;
  Matrix H;
  Vector true_theta;
  Matrix C;
  double sigma = 1.0;
};

/// Volterra heat-kernel deconvolution discretized by the midpoint rule:
/// lower-triangular Toeplitz H with H(i,j) = h k((i-j+1/2) h),
/// k(tau) = tau^{-3/2} / (2 kappa sqrt(pi)) exp(-1/(4 kappa^2 tau)),
/// and the classical piecewise pulse as the true solution.
TestProblem heat_problem(int n, double kappa = 1.0);

/// dim x dim samples of exp(-(i^2+j^2)/(2 sd^2)) centered and normalized to
/// sum 1; dim must be odd.
Matrix gaussian_psf(int dim, double sd);

enum class Boundary { Circular };

/// Circular 2-D convolution by a separable (rank-1, symmetric-factor)
/// kernel, stored through the eigendecompositions of the two 1-D circulant
/// factors so spectra, traces, and solves stay exact at image scale.
class SeparableBlur {
 public:
  SeparableBlur(const Matrix& kernel, int width, int height,
                Boundary boundary = Boundary::Circular);

  int width() const { return width_; }
  int height() const { return height_; }

  /// H x for a height x width image.
  Matrix apply(const Matrix& img) const;
  /// Spectral coordinates E_col^T X E_row and back.
  Matrix to_spectral(const Matrix& img) const;
  Matrix from_spectral(const Matrix& coef) const;
  /// Eigenvalues of H, column-major over the (row, col) eigenpairs.
  Vector eigenvalues() const;
  /// Dense (w*h) x (w*h) matrix acting on column-major vec(X); test scale.
  Matrix dense_matrix() const;

 private:
  int width_, height_;
  Matrix Ecol_, Erow_;
  Vector wcol_, wrow_;
};

SeparableBlur blur_operator(const Matrix& kernel, int width, int height,
                            Boundary boundary = Boundary::Circular);

/// clean + sigma * z with z from the library generator; bit-reproducible.
Vector add_noise(const Vector& clean, double sigma, std::uint64_t seed);

struct GrayImage {
  int width = 0, height = 0;
  Matrix pixels;  // height x width, values in [0, 1]
};

/// Binary PGM (P5, maxval 255) with pixels mapped linearly to [0, 1].
GrayImage pgm_read(const std::string& path);
void pgm_write(const GrayImage& img, const std::string& path);

/// Built-in 64x64-style synthetic test images: "blobs" (smooth Gaussian
/// bumps) and "squares" (piecewise-constant rectangles).
GrayImage synthetic_image(const std::string& name, int size);

/// Plain-text matrix files: first line "rows cols", then row-major
/// whitespace-separated decimals.
Matrix read_matrix_text(const std::string& path);
void write_matrix_text(const Matrix& m, const std::string& path);

}  // namespace gsure
