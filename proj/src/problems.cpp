#include "gsure/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace gsure {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// right-continuous unit step, so an on-grid knot jumps in one sample
double step(double t) { return t >= 0.0 ? 1.0 : 0.0; }

constexpr double kDjPos[] = {0.1,  0.13, 0.15, 0.23, 0.25, 0.40,
                             0.44, 0.65, 0.76, 0.78, 0.81};
constexpr double kBlocksHgt[] = {4.0, -5.0, 3.0, -4.0,  5.0, -4.2,
                                 2.1, 4.3,  -3.1, 2.1,  -4.2};
constexpr double kBumpsHgt[] = {4.0, 5.0, 3.0, 4.0, 5.0, 4.2,
                                2.1, 4.3, 3.1, 5.1, 4.2};
constexpr double kBumpsWid[] = {0.005, 0.005, 0.006, 0.01,  0.01, 0.03,
                                0.01,  0.01,  0.005, 0.008, 0.005};

}  // namespace

Vector dj_signal(const std::string& name, int n) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw Error("invalid-argument", "n must be a power of two");
  const std::string key = lower(name);
  Vector f(n);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    double v = 0.0;
    if (key == "blocks") {
      for (int j = 0; j < 11; ++j) v += kBlocksHgt[j] * step(t - kDjPos[j]);
    } else if (key == "bumps") {
      for (int j = 0; j < 11; ++j)
        v += kBumpsHgt[j] *
             std::pow(1.0 + std::abs((t - kDjPos[j]) / kBumpsWid[j]), -4.0);
    } else if (key == "heavisine") {
      v = 4.0 * std::sin(4.0 * M_PI * t) - (t - 0.3 >= 0 ? 1.0 : -1.0) -
          (0.72 - t >= 0 ? 1.0 : -1.0);
    } else if (key == "doppler") {
      v = std::sqrt(t * (1.0 - t)) *
          std::sin(2.0 * M_PI * 1.05 / (t + 0.05));
    } else {
      throw Error("invalid-argument", "unknown signal name: " + name);
    }
    f[i - 1] = v;
  }
  const double mean = f.mean();
  const double sd = std::sqrt((f.array() - mean).square().sum() / (n - 1));
  return f * (7.0 / sd);
}

TestProblem heat_problem(int n, double kappa) {
  if (n < 8) throw Error("invalid-argument", "heat problem needs n >= 8");
  if (kappa <= 0.0) throw Error("invalid-argument", "kappa must be > 0");
  const double h = 1.0 / n;
  const double c = h / (2.0 * kappa * std::sqrt(M_PI));
  const double d = 1.0 / (4.0 * kappa * kappa);
  Vector k(n);
  for (int l = 0; l < n; ++l) {
    const double tau = (l + 0.5) * h;
    k[l] = c * std::pow(tau, -1.5) * std::exp(-d / tau);
  }
  TestProblem prob;
  prob.name = "heat(" + std::to_string(n) + ")";
  prob.H = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) prob.H(i, j) = k[i - j];
  prob.true_theta = Vector::Zero(n);
  for (int i = 1; i <= n / 2; ++i) {
    const double ti = i * 20.0 / n;
    double v;
    if (ti < 2.0)
      v = 0.75 * ti * ti / 4.0;
    else if (ti < 3.0)
      v = 0.75 + (ti - 2.0) * (3.0 - ti);
    else
      v = 0.75 * std::exp(-(ti - 3.0) * 2.0);
    prob.true_theta[i - 1] = v;
  }
  prob.C = Matrix::Identity(n, n);
  prob.sigma = 1.0;
  return prob;
}

Matrix gaussian_psf(int dim, double sd) {
  if (dim < 1 || dim % 2 == 0)
    throw Error("invalid-argument", "psf dimension must be odd");
  if (sd <= 0.0) throw Error("invalid-argument", "psf sd must be > 0");
  Matrix k(dim, dim);
  const int half = (dim - 1) / 2;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double di = i - half, dj = j - half;
      k(i, j) = std::exp(-(di * di + dj * dj) / (2.0 * sd * sd));
    }
  return k / k.sum();
}

SeparableBlur::SeparableBlur(const Matrix& kernel, int width, int height,
                             Boundary)
    : width_(width), height_(height) {
  if (kernel.rows() > height || kernel.cols() > width)
    throw Error("invalid-argument", "image smaller than the kernel");
  // factor the kernel as an outer product (rank-1 check via SVD)
  Eigen::JacobiSVD<Matrix> svd(kernel,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().size() > 1 &&
      svd.singularValues()[1] > 1e-12 * svd.singularValues()[0])
    throw Error("invalid-argument", "kernel is not separable");
  const double s = svd.singularValues()[0];
  Vector kc = svd.matrixU().col(0) * std::sqrt(s);
  Vector kr = svd.matrixV().col(0) * std::sqrt(s);
  if (kc.sum() < 0) {
    kc = -kc;
    kr = -kr;
  }

  const auto circulant = [](const Vector& taps, int nsize) {
    const int len = static_cast<int>(taps.size());
    const int half = (len - 1) / 2;
    Vector col = Vector::Zero(nsize);
    for (int i = 0; i < len; ++i) {
      const int off = i - half;
      col[((off % nsize) + nsize) % nsize] += taps[i];
    }
    Matrix Cm(nsize, nsize);
    for (int j = 0; j < nsize; ++j)
      for (int i = 0; i < nsize; ++i) Cm(i, j) = col[((i - j) % nsize + nsize) % nsize];
    return Cm;
  };

  const Matrix Cc = circulant(kc, height);
  const Matrix Cr = circulant(kr, width);
  if ((Cc - Cc.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      (Cr - Cr.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error("invalid-argument", "kernel factors must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> ec(Cc), er(Cr);
  Ecol_ = ec.eigenvectors();
  wcol_ = ec.eigenvalues();
  Erow_ = er.eigenvectors();
  wrow_ = er.eigenvalues();
}

Matrix SeparableBlur::apply(const Matrix& img) const {
  if (img.rows() != height_ || img.cols() != width_)
    throw Error("invalid-argument", "image has wrong shape");
  const Matrix spec = to_spectral(img);
  return from_spectral(
      (wcol_ * wrow_.transpose()).cwiseProduct(spec));
}

Matrix SeparableBlur::to_spectral(const Matrix& img) const {
  return Ecol_.transpose() * img * Erow_;
}

Matrix SeparableBlur::from_spectral(const Matrix& coef) const {
  return Ecol_ * coef * Erow_.transpose();
}

Vector SeparableBlur::eigenvalues() const {
  Vector d(static_cast<Eigen::Index>(width_) * height_);
  Eigen::Index idx = 0;
  for (int j = 0; j < width_; ++j)
    for (int i = 0; i < height_; ++i) d[idx++] = wcol_[i] * wrow_[j];
  return d;
}

Matrix SeparableBlur::dense_matrix() const {
  const Matrix Cc = Ecol_ * wcol_.asDiagonal() * Ecol_.transpose();
  const Matrix Cr = Erow_ * wrow_.asDiagonal() * Erow_.transpose();
  const Eigen::Index N = static_cast<Eigen::Index>(width_) * height_;
  Matrix H(N, N);
  // vec(Cc X Cr^T) = (Cr kron Cc) vec(X), column-major
  for (int jb = 0; jb < width_; ++jb)
    for (int ib = 0; ib < height_; ++ib)
      for (int ja = 0; ja < width_; ++ja)
        for (int ia = 0; ia < height_; ++ia)
          H(ja * height_ + ia, jb * height_ + ib) = Cr(ja, jb) * Cc(ia, ib);
  return H;
}

SeparableBlur blur_operator(const Matrix& kernel, int width, int height,
                            Boundary boundary) {
  return SeparableBlur(kernel, width, height, boundary);
}

Vector add_noise(const Vector& clean, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw Error("invalid-argument", "sigma must be >= 0");
  Rng rng(seed);
  Vector out = clean;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] += sigma * rng.normal();
  return out;
}

GrayImage pgm_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic == "P2")
    throw Error("io-error", "ASCII PGM (P2) is not supported; use binary P5");
  if (magic != "P5") throw Error("io-error", "not a binary PGM file");
  const auto next_token = [&in]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw Error("io-error", "truncated PGM header");
  };
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval != 255)
    throw Error("io-error", "only maxval 255 PGM files are supported");
  in.get();  // single whitespace after maxval
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw Error("io-error", "truncated PGM pixel data");
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      img.pixels(i, j) = buf[static_cast<std::size_t>(i) * w + j] / 255.0;
  return img;
}

void pgm_write(const GrayImage& img, const std::string& path) {
  if (img.pixels.rows() != img.height || img.pixels.cols() != img.width)
    throw Error("invalid-argument", "image shape mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", "cannot write " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  for (int i = 0; i < img.height; ++i)
    for (int j = 0; j < img.width; ++j) {
      const double v = std::clamp(img.pixels(i, j), 0.0, 1.0);
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
}

GrayImage synthetic_image(const std::string& name, int size) {
  const std::string key = lower(name);
  GrayImage img;
  img.width = img.height = size;
  img.pixels = Matrix::Zero(size, size);
  if (key == "blobs") {
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) {
        const double y = static_cast<double>(i) / size;
        const double x = static_cast<double>(j) / size;
        double v = 0.8 * std::exp(-((x - 0.3) * (x - 0.3) +
                                    (y - 0.4) * (y - 0.4)) /
                                  0.02) +
                   0.6 * std::exp(-((x - 0.7) * (x - 0.7) +
                                    (y - 0.65) * (y - 0.65)) /
                                  0.01);
        img.pixels(i, j) = std::clamp(v, 0.0, 1.0);
      }
  } else if (key == "squares") {
    const auto block = [&](double r0, double r1, double c0, double c1,
                           double v) {
      for (int i = static_cast<int>(r0 * size); i < static_cast<int>(r1 * size);
           ++i)
        for (int j = static_cast<int>(c0 * size);
             j < static_cast<int>(c1 * size); ++j)
          img.pixels(i, j) = v;
    };
    block(0.125, 0.375, 0.125, 0.4375, 0.9);
    block(0.53, 0.84, 0.47, 0.78, 0.5);
    block(0.19, 0.31, 0.625, 0.9375, 0.7);
  } else {
    throw Error("invalid-argument", "unknown synthetic image: " + name);
  }
  return img;
}

Matrix read_matrix_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path);
  Eigen::Index rows, cols;
  if (!(in >> rows >> cols))
    throw Error("io-error", "bad matrix header in " + path);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j)))
        throw Error("io-error", "truncated matrix data in " + path);
  return m;
}

void write_matrix_text(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot write " + path);
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << buf << (j + 1 == m.cols() ? "" : " ");
    }
    out << "\n";
  }
}

}  // namespace gsure
