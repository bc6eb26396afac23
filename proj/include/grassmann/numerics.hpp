#ifndef GRASSMANN_NUMERICS_HPP
#define GRASSMANN_NUMERICS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace grassmann {

using cplx = std::complex<double>;

/* Seeded random stream. One instance per task; never shared across threads. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform() { return unif_(gen_); }
  cplx cnormal() { return cplx(normal_(gen_), normal_(gen_)); }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

/* Compensated accumulation of doubles. */
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

struct KahanSumC {
  KahanSum re, im;
  void add(cplx z) {
    re.add(z.real());
    im.add(z.imag());
  }
  cplx value() const { return cplx(re.value(), im.value()); }
};

struct QuadSpec {
  int dimension = 1;      // 1 or 2
  double radius = 1.0;    // Euclidean bound on |t| over the chamber
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_evals = 4000000;
};

struct QuadResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long evals = 0;
};

/* Adaptive Gauss-Kronrod 15(7) on [a,b]. */
QuadResult quad_adaptive(const std::function<cplx(double)>& f, double a, double b,
                         double abs_tol, double rel_tol, int max_evals);

/* Integral over the truncated chamber.
 * dimension 1: {0 < t < radius}.
 * dimension 2: {t1 > t2 > 0, t1^2 + t2^2 <= radius^2}, integrated as nested
 * adaptive rules (outer in t2, inner in t1). */
QuadResult quad_chamber(const std::function<cplx(const std::vector<double>&)>& f,
                        const QuadSpec& spec);

/* Newton divided difference f[nodes..., t], confluent entries by finite
 * differences. When f vanishes at every node this equals f(t)/prod(t - t_i). */
cplx divided_ratio(const std::function<cplx(double)>& f,
                   const std::vector<double>& nodes, double t);

/* Central second difference with one Richardson step. */
double fd_second(const std::function<double(double)>& f, double x, double h);
cplx fd_second_c(const std::function<cplx(double)>& f, double x, double h);

/* Haar-distributed n x n unitary: QR of a complex Ginibre matrix with the
 * R-diagonal phase pushed into Q. Returned as column-major n*n data. */
std::vector<cplx> haar_unitary(Rng& rng, int n);

/* Parallel map over [0, n) with a thread cap from GRASSMANN_HARMONICS_THREADS.
 * Bodies must be pure per index; results are written to caller-owned slots. */
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
int thread_cap();

}  // namespace grassmann

#endif
