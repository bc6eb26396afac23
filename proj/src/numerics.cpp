#include "grassmann/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

namespace grassmann {

namespace {

/* 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
 * (positive half; the rule is symmetric). */
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  cplx value;
  double err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

Segment gk15(const std::function<cplx(double)>& f, double a, double b) {
  const double hl = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  cplx fc = f(c);
  cplx resk = kWgk[7] * fc;
  cplx resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double x = hl * kXgk[j];
    cplx f1 = f(c - x);
    cplx f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  cplx value = resk * hl;
  double err = std::abs(resk - resg) * std::abs(hl);
  return Segment{a, b, value, std::max(err, 1e-300)};
}

}  // namespace

QuadResult quad_adaptive(const std::function<cplx(double)>& f, double a, double b,
                         double abs_tol, double rel_tol, int max_evals) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Segment> heap;
  Segment s0 = gk15(f, a, b);
  out.evals = 15;
  cplx total = s0.value;
  double toterr = s0.err;
  heap.push(s0);
  while (toterr > std::max(abs_tol, rel_tol * std::abs(total)) &&
         out.evals + 30 <= max_evals && !heap.empty()) {
    Segment worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted
    Segment l = gk15(f, worst.a, mid);
    Segment r = gk15(f, mid, worst.b);
    out.evals += 30;
    total += l.value + r.value - worst.value;
    toterr += l.err + r.err - worst.err;
    heap.push(l);
    heap.push(r);
  }
  out.value = total;
  out.error_estimate = toterr;
  return out;
}

QuadResult quad_chamber(const std::function<cplx(const std::vector<double>&)>& f,
                        const QuadSpec& spec) {
  if (spec.dimension != 1 && spec.dimension != 2)
    throw std::invalid_argument("quad_chamber: dimension must be 1 or 2");
  if (spec.radius <= 0 || spec.abs_tol <= 0 || spec.rel_tol <= 0)
    throw std::invalid_argument("quad_chamber: positive radius/tolerances required");

  if (spec.dimension == 1) {
    auto g = [&f](double t) {
      std::vector<double> p{t};
      return f(p);
    };
    QuadResult r =
        quad_adaptive(g, 0.0, spec.radius, spec.abs_tol, spec.rel_tol, spec.max_evals);
    if (r.error_estimate > 10.0 * std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value)))
      throw std::runtime_error("quad_chamber: evaluation budget exhausted");
    return r;
  }

  const double R = spec.radius;
  std::atomic<long> evals{0};
  const double inner_abs = spec.abs_tol / (4.0 * std::max(R, 1.0));
  const double inner_rel = std::min(1e-13, 0.1 * spec.rel_tol);
  double inner_err_acc = 0.0;
  auto outer = [&](double t2) -> cplx {
    double t1max = std::sqrt(std::max(R * R - t2 * t2, 0.0));
    if (t1max <= t2) return cplx(0.0);
    auto g = [&f, t2](double t1) {
      std::vector<double> p{t1, t2};
      return f(p);
    };
    QuadResult inner = quad_adaptive(g, t2, t1max, inner_abs, inner_rel,
                                     spec.max_evals / 64);
    evals += inner.evals;
    inner_err_acc += inner.error_estimate;
    return inner.value;
  };
  QuadResult r = quad_adaptive(outer, 0.0, R / std::sqrt(2.0), spec.abs_tol,
                               spec.rel_tol, spec.max_evals);
  r.evals = evals.load() + r.evals;
  r.error_estimate += inner_err_acc;
  if (r.evals > spec.max_evals)
    throw std::runtime_error("quad_chamber: evaluation budget exhausted");
  return r;
}

namespace {

/* k-th derivative of f at x over k!, by central differences on a 5-point
 * stencil; enough for the confluent multiplicities that arise here (<= 3). */
cplx scaled_derivative(const std::function<cplx(double)>& f, double x, int k) {
  const double h = 1e-3 * (1.0 + std::abs(x));
  cplx fm2 = f(x - 2 * h), fm1 = f(x - h), f0 = f(x), fp1 = f(x + h), fp2 = f(x + 2 * h);
  switch (k) {
    case 1:
      return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    case 2:
      return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h) / 2.0;
    case 3:
      return (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h * h * h) / 6.0;
    default:
      throw std::invalid_argument("divided_ratio: node multiplicity above 4");
  }
}

}  // namespace

cplx divided_ratio(const std::function<cplx(double)>& f,
                   const std::vector<double>& nodes, double t) {
  std::vector<double> z = nodes;
  z.push_back(t);
  std::sort(z.begin(), z.end());
  const std::size_t n = z.size();
  double scale = 1.0;
  for (double zi : z) scale = std::max(scale, std::abs(zi));
  const double conf_tol = 1e-12 * scale;

  /* Hermite-Newton tableau: repeated abscissae take f^(k)/k! entries. */
  std::vector<cplx> fz(n);
  for (std::size_t i = 0; i < n; ++i) fz[i] = f(z[i]);
  std::vector<std::vector<cplx>> tab(n);
  for (std::size_t i = 0; i < n; ++i) tab[i].resize(n - i);
  for (std::size_t i = 0; i < n; ++i) tab[i][0] = fz[i];
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i + j < n; ++i) {
      double dz = z[i + j] - z[i];
      if (std::abs(dz) < conf_tol) {
        tab[i][j] = scaled_derivative(f, z[i], static_cast<int>(j));
      } else {
        tab[i][j] = (tab[i + 1][j - 1] - tab[i][j - 1]) / dz;
      }
    }
  }
  return tab[0][n - 1];
}

double fd_second(const std::function<double(double)>& f, double x, double h) {
  auto d2 = [&](double hh) { return (f(x - hh) - 2.0 * f(x) + f(x + hh)) / (hh * hh); };
  double c = d2(h), fine = d2(0.5 * h);
  return (4.0 * fine - c) / 3.0;
}

cplx fd_second_c(const std::function<cplx(double)>& f, double x, double h) {
  auto d2 = [&](double hh) { return (f(x - hh) - 2.0 * f(x) + f(x + hh)) / (hh * hh); };
  cplx c = d2(h), fine = d2(0.5 * h);
  return (4.0 * fine - c) / 3.0;
}

std::vector<cplx> haar_unitary(Rng& rng, int n) {
  if (n <= 0) throw std::invalid_argument("haar_unitary: n must be positive");
  /* Column-major Ginibre draw followed by modified Gram-Schmidt; the diagonal
   * phase of R is pushed into Q so the distribution is exactly Haar. */
  std::vector<cplx> a(static_cast<std::size_t>(n) * n);
  for (auto& x : a) x = rng.cnormal() / std::sqrt(2.0);
  auto col = [&a, n](int j) { return a.data() + static_cast<std::size_t>(j) * n; };
  for (int j = 0; j < n; ++j) {
    cplx* cj = col(j);
    /* two MGS passes for numerical safety; the implicit R has a positive
     * real diagonal, which is exactly the phase convention that makes the
     * Ginibre QR factor Haar distributed */
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        const cplx* ck = col(k);
        cplx dot(0.0);
        for (int i = 0; i < n; ++i) dot += std::conj(ck[i]) * cj[i];
        for (int i = 0; i < n; ++i) cj[i] -= dot * ck[i];
      }
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += std::norm(cj[i]);
    nrm = std::sqrt(nrm);
    for (int i = 0; i < n; ++i) cj[i] /= nrm;
  }
  return a;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  int nt = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), n));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err = nullptr;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

int thread_cap() {
  static int cap = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("GRASSMANN_HARMONICS_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return std::min(v, 4 * hw);
    }
    return hw;
  }();
  return cap;
}

}  // namespace grassmann
