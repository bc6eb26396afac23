#include "grassmann/geometry.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace grassmann {

namespace {

const cplx kI(0.0, 1.0);

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

/* Unitary change of basis to the weight basis of the flat: columns
 * (e_i + e_{r+i})/sqrt2 (weights +t_i, descending), the b zero-weight
 * coordinates, then (e_i - e_{r+i})/sqrt2 in reversed order (weights -t_i,
 * still descending). Conjugation sends the Iwasawa factors to
 * unitary x positive-diagonal x unit-upper-triangular. */
Mat weight_basis(const Geometry& geom) {
  const int r = geom.r, b = geom.b, n = geom.n;
  Mat C = Mat::Zero(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < r; ++i) {
    C(i, i) = s;
    C(r + i, i) = s;
  }
  for (int j = 0; j < b; ++j) C(2 * r + j, r + j) = 1.0;
  for (int i = 0; i < r; ++i) {
    int col = r + b + i;         // holds v_{r-i}
    int idx = r - 1 - i;
    C(idx, col) = s;
    C(r + idx, col) = -s;
  }
  return C;
}

void check_unitary(const Mat& U, double tol, const char* what) {
  Mat resid = U.adjoint() * U - Mat::Identity(U.rows(), U.cols());
  if (max_abs(resid) > tol) throw std::domain_error(what);
}

}  // namespace

Geometry::Geometry(int r_, int b_) : r(r_), b(b_), n(2 * r_ + b_) {
  if (r < 1) throw std::invalid_argument("Geometry: rank must be >= 1");
  if (b < 0) throw std::invalid_argument("Geometry: b must be >= 0");
  killing_scale = 2.0 * n;
}

Mat Geometry::J() const {
  Mat j = Mat::Identity(n, n);
  for (int i = r; i < n; ++i) j(i, i) = -1.0;
  return j;
}

GroupElement::GroupElement(const Geometry& g, Mat mat) : m(std::move(mat)), geom(g) {
  if (m.rows() != geom.n || m.cols() != geom.n)
    throw std::invalid_argument("GroupElement: wrong dimensions");
  double scale = std::max(1.0, max_abs(m));
  double tol = 1e-10 * scale * scale;
  Mat j = geom.J();
  if (max_abs(m.adjoint() * j * m - j) > tol)
    throw std::domain_error("GroupElement: matrix is not J-unitary");
  if (std::abs(m.determinant() - cplx(1.0, 0.0)) > tol)
    throw std::domain_error("GroupElement: determinant is not one");
}

KElement::KElement(Mat A_, Mat D_) : A(std::move(A_)), D(std::move(D_)) {
  if (A.rows() != A.cols() || D.rows() != D.cols())
    throw std::invalid_argument("KElement: blocks must be square");
  check_unitary(A, 1e-10, "KElement: A block is not unitary");
  check_unitary(D, 1e-10, "KElement: D block is not unitary");
  if (std::abs(A.determinant() * D.determinant() - cplx(1.0, 0.0)) > 1e-10)
    throw std::domain_error("KElement: det A * det D must be one");
}

bool ChamberPoint::closed(double tol) const {
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (t[i] < t[i + 1] - tol) return false;
  return t.empty() || t.back() >= -tol;
}

bool ChamberPoint::open(double tol) const {
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (t[i] <= t[i + 1] + tol) return false;
  return !t.empty() && t.back() > tol;
}

GroupElement make_a(const Geometry& geom, const std::vector<double>& t) {
  if (static_cast<int>(t.size()) != geom.r)
    throw std::invalid_argument("make_a: expected r coordinates");
  Mat m = Mat::Identity(geom.n, geom.n);
  for (int i = 0; i < geom.r; ++i) {
    double c = std::cosh(t[i]), s = std::sinh(t[i]);
    m(i, i) = c;
    m(geom.r + i, geom.r + i) = c;
    m(i, geom.r + i) = s;
    m(geom.r + i, i) = s;
  }
  return GroupElement(geom, std::move(m));
}

GroupElement group_identity(const Geometry& geom) {
  return GroupElement(geom, Mat::Identity(geom.n, geom.n));
}

GroupElement group_mul(const GroupElement& x, const GroupElement& y) {
  return GroupElement(x.geom, x.m * y.m);
}

GroupElement group_inverse(const GroupElement& x) {
  Mat j = x.geom.J();
  return GroupElement(x.geom, j * x.m.adjoint() * j);
}

GroupElement k_embed(const Geometry& geom, const KElement& k) {
  if (k.A.rows() != geom.r || k.D.rows() != geom.r + geom.b)
    throw std::invalid_argument("k_embed: block sizes do not match geometry");
  Mat m = Mat::Zero(geom.n, geom.n);
  m.topLeftCorner(geom.r, geom.r) = k.A;
  m.bottomRightCorner(geom.r + geom.b, geom.r + geom.b) = k.D;
  return GroupElement(geom, std::move(m));
}

GroupElement random_group_element(const Geometry& geom, Rng& rng, double scale) {
  const int r = geom.r, q = geom.r + geom.b, n = geom.n;
  Mat A(r, r), D(q, q), B(r, q);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) A(i, j) = scale * rng.cnormal();
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) D(i, j) = scale * rng.cnormal();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < q; ++j) B(i, j) = scale * rng.cnormal();
  A = 0.5 * (A - A.adjoint()).eval();
  D = 0.5 * (D - D.adjoint()).eval();
  cplx tr = A.trace() + D.trace();
  D -= (tr / static_cast<double>(q)) * Mat::Identity(q, q);
  Mat X = Mat::Zero(n, n);
  X.topLeftCorner(r, r) = A;
  X.topRightCorner(r, q) = B;
  X.bottomLeftCorner(q, r) = B.adjoint();
  X.bottomRightCorner(q, q) = D;
  return GroupElement(geom, X.exp());
}

KElement k_identity(const Geometry& geom) {
  return KElement(Mat::Identity(geom.r, geom.r),
                  Mat::Identity(geom.r + geom.b, geom.r + geom.b));
}

KElement k_mul(const KElement& x, const KElement& y) {
  return KElement(x.A * y.A, x.D * y.D);
}

KElement k_adjoint(const KElement& x) { return KElement(x.A.adjoint(), x.D.adjoint()); }

KElement haar_k_next(const Geometry& geom, Rng& rng) {
  const int r = geom.r, q = geom.r + geom.b;
  std::vector<cplx> ud = haar_unitary(rng, r);
  std::vector<cplx> vd = haar_unitary(rng, q);
  Mat U = Eigen::Map<Mat>(ud.data(), r, r);
  Mat V = Eigen::Map<Mat>(vd.data(), q, q);
  double phase = -std::arg(U.determinant() * V.determinant()) / q;
  V *= std::polar(1.0, phase);
  return KElement(std::move(U), std::move(V));
}

std::vector<KElement> haar_k_sample(const Geometry& geom, std::uint64_t seed,
                                    int count) {
  Rng rng(seed);
  std::vector<KElement> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) out.push_back(haar_k_next(geom, rng));
  return out;
}

std::vector<double> rho(const Geometry& geom) {
  std::vector<double> out(geom.r);
  for (int j = 1; j <= geom.r; ++j)
    out[j - 1] = geom.b + 1 + 2 * (geom.r - j);
  return out;
}

std::vector<double> rho_l(const Geometry& geom, int l) {
  std::vector<double> out = rho(geom);
  for (double& x : out) x -= l;
  return out;
}

namespace {

struct IwasawaCore {
  std::vector<double> H;
  Mat Q;  // unitary factor in the weight basis, pivot phases fixed
  Mat M;  // weight-basis image of g
};

IwasawaCore iwasawa_core(const GroupElement& g) {
  const Geometry& geom = g.geom;
  const int r = geom.r, n = geom.n;
  Mat C = weight_basis(geom);
  Mat M = C.adjoint() * g.m * C;

  Eigen::HouseholderQR<Mat> qr(M);
  Mat Q = qr.householderQ();
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    double mag = std::abs(R(j, j));
    if (!(mag > 0.0))
      throw std::domain_error("iwasawa: singular pivot; input is not a group element");
    cplx d = R(j, j) / mag;
    Q.col(j) *= d;
    R.row(j) *= std::conj(d);
  }

  std::vector<double> H(r);
  for (int j = 0; j < r; ++j) {
    double piv = R(j, j).real();
    if (!(piv > 0.0))
      throw std::domain_error("iwasawa: loss of positivity; input is not a group element");
    H[j] = std::log(piv);
  }
  return IwasawaCore{std::move(H), std::move(Q), std::move(M)};
}

}  // namespace

IwasawaFactors iwasawa(const GroupElement& g) {
  const Geometry& geom = g.geom;
  const int r = geom.r, n = geom.n;
  IwasawaCore core = iwasawa_core(g);
  Mat C = weight_basis(geom);

  Mat kappa = C * core.Q * C.adjoint();
  double leak = std::max(max_abs(kappa.topRightCorner(r, n - r)),
                         max_abs(kappa.bottomLeftCorner(n - r, r)));
  if (leak > 1e-8)
    throw std::domain_error("iwasawa: k-factor leaks off the block diagonal");
  KElement k(kappa.topLeftCorner(r, r), kappa.bottomRightCorner(n - r, n - r));

  /* n = exp(-H) k^{-1} g keeps the reconstruction k exp(H) n exact. */
  Mat aw_inv = Mat::Identity(n, n);
  for (int j = 0; j < r; ++j) {
    aw_inv(j, j) = std::exp(-core.H[j]);
    aw_inv(n - 1 - j, n - 1 - j) = std::exp(core.H[j]);
  }
  Mat Nw = aw_inv * (core.Q.adjoint() * core.M);
  GroupElement n_part(geom, C * Nw * C.adjoint());
  return IwasawaFactors{std::move(k), std::move(core.H), std::move(n_part)};
}

namespace {

/* Unitary polar factor through the SVD of m itself: for m = W S V*, the
 * polar factor is W V*, unitary to machine precision at any conditioning
 * (unlike m (m* m)^{-1/2}, which loses cond(m) digits). The same SVD gives
 * (1/2) log(m* m) = V log(S) V*. */
struct PolarSvd {
  Eigen::JacobiSVD<Mat> svd;
  explicit PolarSvd(const Mat& m)
      : svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV) {}
  Mat unitary() const { return svd.matrixU() * svd.matrixV().adjoint(); }
  Mat half_log() const {
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::VectorXcd lg(s.size());
    for (int i = 0; i < s.size(); ++i) lg(i) = std::log(std::max(s(i), 1e-300));
    return svd.matrixV() * lg.asDiagonal() * svd.matrixV().adjoint();
  }
};

}  // namespace

CartanFactors cartan(const GroupElement& g) {
  const Geometry& geom = g.geom;
  const int r = geom.r, q = geom.r + geom.b, n = geom.n;
  PolarSvd polar(g.m);

  /* X = (1/2) log(g* g) is Hermitian with zero diagonal blocks */
  Mat X = polar.half_log();
  Mat Z = X.topRightCorner(r, q);
  Eigen::JacobiSVD<Mat> svd(Z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sing = svd.singularValues();
  Mat U = svd.matrixU();
  Mat V = svd.matrixV();
  double theta = -std::arg(U.determinant() * V.determinant()) / n;
  U *= std::polar(1.0, theta);
  V *= std::polar(1.0, theta);

  Mat u_p = polar.unitary();
  /* u_p is block diagonal for group input but the computed blocks leak and
   * drift in phase like cond(g)^2 eps; project each block back onto the
   * unitary group and spread the det correction as a scalar so k1 is in K
   * by construction. */
  Mat k1A = PolarSvd(Mat(u_p.topLeftCorner(r, r) * U)).unitary();
  Mat k1D = PolarSvd(Mat(u_p.bottomRightCorner(q, q) * V)).unitary();
  cplx s = k1A.determinant() * k1D.determinant();
  cplx fix = std::polar(1.0, -std::arg(s) / n);
  k1A *= fix;
  k1D *= fix;

  std::vector<double> t(sing.data(), sing.data() + r);
  return CartanFactors{KElement(std::move(k1A), std::move(k1D)),
                       ChamberPoint(std::move(t)),
                       KElement(U.adjoint(), V.adjoint())};
}

ChamberPoint cartan_radial(const GroupElement& g) {
  Eigen::JacobiSVD<Mat> svd(g.m);
  std::vector<double> t(g.geom.r);
  for (int j = 0; j < g.geom.r; ++j)
    t[j] = std::max(0.0, std::log(svd.singularValues()(j)));
  return ChamberPoint(std::move(t));
}

KElement polar_k(const GroupElement& g) {
  const int r = g.geom.r, q = g.geom.r + g.geom.b;
  Mat u_p = PolarSvd(g.m).unitary();
  double leak = std::max(max_abs(u_p.topRightCorner(r, q)),
                         max_abs(u_p.bottomLeftCorner(q, r)));
  if (leak > 1e-8)
    throw std::domain_error("polar_k: unitary factor leaks off the block diagonal");
  return KElement(u_p.topLeftCorner(r, r), u_p.bottomRightCorner(q, q));
}

cplx tau(const KElement& k, int l) {
  return std::polar(1.0, l * std::arg(k.D.determinant()));
}

cplx tau_pi0(const GroupElement& g, int l) {
  const int q = g.geom.r + g.geom.b;
  cplx det = g.m.bottomRightCorner(q, q).determinant();
  if (std::abs(det) == 0.0)
    throw std::domain_error("tau_pi0: singular lower-right block");
  return std::polar(1.0, l * std::arg(det));
}

std::pair<std::vector<double>, KElement> boundary_pair(const GroupElement& g,
                                                       const KElement& k) {
  /* Only (H, kappa) of g^{-1}k matter here, and deep translates g make the
   * weight-basis QR lose digits like cond(g)^2: the n-part residual and the
   * off-block leakage of kappa then trip the strict iwasawa() validation
   * long before H and the kappa phases stop being usable inside
   * e^{-rho(H)}-weighted kernels. Skip the n-part and project kappa back
   * onto K blockwise instead. */
  const Geometry& geom = g.geom;
  const int r = geom.r, n = geom.n;
  GroupElement gk = group_mul(group_inverse(g), k_embed(geom, k));
  IwasawaCore core = iwasawa_core(gk);
  Mat C = weight_basis(geom);
  Mat kappa = C * core.Q * C.adjoint();
  Mat A = PolarSvd(kappa.topLeftCorner(r, r)).unitary();
  Mat D = PolarSvd(kappa.bottomRightCorner(n - r, n - r)).unitary();
  cplx s = A.determinant() * D.determinant();
  A.col(0) *= std::conj(s) / std::abs(s);
  return {std::move(core.H), KElement(std::move(A), std::move(D))};
}

WeylDensity weyl_density(const Geometry& geom, const ChamberPoint& t) {
  const int r = geom.r, b = geom.b;
  if (t.rank() != r) throw std::invalid_argument("weyl_density: rank mismatch");
  double omega = std::pow(2.0, 0.5 * r * (r - 1));
  for (int j = 0; j < r; ++j)
    for (int k = j + 1; k < r; ++k)
      omega *= std::cosh(2.0 * t.t[j]) - std::cosh(2.0 * t.t[k]);
  double delta = omega * omega * std::pow(2.0, r * (2 * b + 1));
  double u = std::pow(2.0, r);
  for (int j = 0; j < r; ++j) {
    delta *= std::pow(std::sinh(t.t[j]), 2 * b) * std::sinh(2.0 * t.t[j]);
    u *= std::cosh(t.t[j]);
  }
  return WeylDensity{delta, omega, u};
}

double tau_min(const Geometry& geom, const ChamberPoint& t) {
  if (t.rank() != geom.r) throw std::invalid_argument("tau_min: rank mismatch");
  double beta_r = (geom.b == 0) ? 2.0 * t.t.back() : t.t.back();
  double m = beta_r;
  for (int j = 0; j + 1 < geom.r; ++j) m = std::min(m, t.t[j] - t.t[j + 1]);
  return m;
}

double distance(const GroupElement& g) {
  ChamberPoint t = cartan_radial(g);
  double s2 = 0.0;
  for (double x : t.t) s2 += x * x;
  return 2.0 * std::sqrt(g.geom.n * s2);
}

std::vector<cplx> lemma_a_limit(const GroupElement& g, const ChamberPoint& t,
                                const std::vector<double>& R_grid, int l) {
  const Geometry& geom = g.geom;
  const int r = geom.r, q = geom.r + geom.b;
  if (t.rank() != r) throw std::invalid_argument("lemma_a_limit: rank mismatch");
  if (!t.open())
    throw std::domain_error("lemma_a_limit: direction must be in the open chamber");
  /* tau_l(pi_0(g a_{Rt})) through the lower-right block determinant:
   * the sinh/cosh columns of a_{Rt} reduce to tanh factors on the first r
   * columns, so no large scales enter. */
  Mat gC = g.m.bottomLeftCorner(q, r);
  Mat gD = g.m.bottomRightCorner(q, q);
  std::vector<cplx> out;
  out.reserve(R_grid.size());
  for (double R : R_grid) {
    Mat B = gD;
    for (int j = 0; j < r; ++j) B.col(j) += std::tanh(R * t.t[j]) * gC.col(j);
    out.push_back(std::polar(1.0, l * std::arg(B.determinant())));
  }
  return out;
}

std::vector<WeylElement> weyl_group(int r) {
  std::vector<WeylElement> out;
  std::vector<int> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end());
  do {
    for (int mask = 0; mask < (1 << r); ++mask) {
      WeylElement s;
      s.perm = perm;
      s.signs.resize(r);
      for (int i = 0; i < r; ++i) s.signs[i] = (mask >> i) & 1 ? -1 : 1;
      out.push_back(std::move(s));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

WeylElement weyl_identity(int r) {
  WeylElement s;
  s.signs.assign(r, 1);
  s.perm.resize(r);
  std::iota(s.perm.begin(), s.perm.end(), 0);
  return s;
}

WeylElement weyl_compose(const WeylElement& s1, const WeylElement& s2) {
  const int r = static_cast<int>(s1.perm.size());
  WeylElement out;
  out.perm.resize(r);
  out.signs.resize(r);
  for (int i = 0; i < r; ++i) {
    out.perm[i] = s2.perm[s1.perm[i]];
    out.signs[i] = s1.signs[i] * s2.signs[s1.perm[i]];
  }
  return out;
}

WeylElement weyl_inverse(const WeylElement& s) {
  const int r = static_cast<int>(s.perm.size());
  WeylElement out;
  out.perm.resize(r);
  out.signs.resize(r);
  for (int i = 0; i < r; ++i) {
    out.perm[s.perm[i]] = i;
    out.signs[s.perm[i]] = s.signs[i];
  }
  return out;
}

std::vector<cplx> weyl_act(const WeylElement& s, const std::vector<cplx>& lam) {
  const std::size_t r = lam.size();
  std::vector<cplx> out(r);
  for (std::size_t i = 0; i < r; ++i)
    out[i] = static_cast<double>(s.signs[i]) * lam[s.perm[i]];
  return out;
}

bool weyl_is_identity(const WeylElement& s) {
  for (std::size_t i = 0; i < s.perm.size(); ++i)
    if (s.perm[i] != static_cast<int>(i) || s.signs[i] != 1) return false;
  return true;
}

}  // namespace grassmann
