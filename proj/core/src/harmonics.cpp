// Copyright 2026 The Kamlab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kamlab/harmonics.hpp"

#include <algorithm>
#include <random>

#include "kamlab/kam.hpp"

namespace kamlab {

namespace {

mpz_class binom(long n, long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

// Integer powers of a complex number, c^e with e >= 0.
Complex cpow(const Complex& c, long e) {
  Complex acc = Complex::one();
  for (long i = 0; i < e; ++i) acc = acc * c;
  return acc;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

Complex harmonic_monomial(long l, long m, const Complex& zeta,
                          const Complex& omega) {
  if (l < 0 || l > m) throw PreconditionError("harmonic_monomial: 0 <= l <= m");
  mpz_class num, den;
  mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(m + 1));
  mpz_class lf, mlf;
  mpz_fac_ui(lf.get_mpz_t(), static_cast<unsigned long>(l));
  mpz_fac_ui(mlf.get_mpz_t(), static_cast<unsigned long>(m - l));
  den = lf * mlf;
  Real scale = sqrt(Real(num) / Real(den));
  return scale * (cpow(zeta, l) * cpow(omega, m - l));
}

RepMatrix representation_matrix(const GroupElement& s, long m) {
  RepMatrix out;
  out.m = m;
  out.e.assign(static_cast<std::size_t>((m + 1) * (m + 1)), Complex::zero());
  // Pullback action (S.phi)(v) = phi(S^* v): expand with the adjoint entries.
  GroupElement t = s.inverse();
  const Complex& z = t.z;
  const Complex& w = t.w;
  Complex zb = conj(z), wb = conj(w);
  // Powers cache.
  std::vector<Complex> zp(m + 1), wp(m + 1), zbp(m + 1), wbp(m + 1);
  zp[0] = wp[0] = zbp[0] = wbp[0] = Complex::one();
  for (long i = 1; i <= m; ++i) {
    zp[i] = zp[i - 1] * z;
    wp[i] = wp[i - 1] * w;
    zbp[i] = zbp[i - 1] * zb;
    wbp[i] = wbp[i - 1] * wb;
  }
  // S.psi_j(v) = psi_j(S v) = c_j (z zeta + w omega)^j (-w~ zeta + z~ omega)^{m-j}.
  // Coefficient of zeta^p omega^{m-p} contributes to entry (p, j).
  for (long j = 0; j <= m; ++j) {
    for (long p = 0; p <= m; ++p) {
      Complex acc = Complex::zero();
      for (long a = std::max(0L, p - (m - j)); a <= std::min(j, p); ++a) {
        long b = p - a;  // from the second factor
        Complex term = Real(mpz_class(binom(j, a) * binom(m - j, b))) *
                       (zp[a] * wp[j - a] * wbp[b] * zbp[m - j - b]);
        if (b & 1L) term = -term;
        acc += term;
      }
      // Normalization ratio c_j / c_p = sqrt(p!(m-p)!/(j!(m-j)!)).
      mpz_class pf, mpf, jf, mjf;
      mpz_fac_ui(pf.get_mpz_t(), static_cast<unsigned long>(p));
      mpz_fac_ui(mpf.get_mpz_t(), static_cast<unsigned long>(m - p));
      mpz_fac_ui(jf.get_mpz_t(), static_cast<unsigned long>(j));
      mpz_fac_ui(mjf.get_mpz_t(), static_cast<unsigned long>(m - j));
      Real ratio = sqrt(Real(mpz_class(pf * mpf)) / Real(mpz_class(jf * mjf)));
      out.e[p * (m + 1) + j] = ratio * acc;
    }
  }
  return out;
}

Real legendre_projection(const GroupElement& d, long m) {
  if (m <= 0 || (m & 1L) != 0)
    throw PreconditionError("legendre_projection requires positive even m");
  long l = m / 2;
  Real z2 = norm2(d.z);
  Real w2 = norm2(d.w);
  Real acc(0L);
  for (long i = 0; i <= l; ++i) {
    mpz_class c = binom(l, i);
    Real term = Real(mpz_class(c * c)) * pow(z2, Real(l - i)) * pow(w2, Real(i));
    if (i & 1L) acc -= term;
    else acc += term;
  }
  return acc;
}

FiberFunction::FiberFunction(long m, long n_trunc) : m_(m), n_trunc_(n_trunc) {
  if (m < 0 || n_trunc < 0) throw PreconditionError("bad FiberFunction shape");
  c_.assign(static_cast<std::size_t>((2 * n_trunc + 1) * (m + 1) * (m + 1)),
            Complex::zero());
}

FiberFunction FiberFunction::basis(long m, long n_trunc, long k, long j,
                                   long p) {
  FiberFunction f(m, n_trunc);
  f.set_coeff(k, j, p, Complex::one());
  return f;
}

Complex FiberFunction::coeff(long k, long j, long p) const {
  if (std::labs(k) > n_trunc_ || j < 0 || j > m_ || p < 0 || p > m_)
    return Complex::zero();
  return c_[idx(k, j, p)];
}

void FiberFunction::set_coeff(long k, long j, long p, const Complex& c) {
  if (std::labs(k) > n_trunc_ || j < 0 || j > m_ || p < 0 || p > m_)
    throw PreconditionError("FiberFunction coefficient out of range");
  c_[idx(k, j, p)] = c;
}

Real FiberFunction::norm() const {
  Real acc(0L);
  for (const auto& x : c_) acc += norm2(x);
  return sqrt(acc);
}

RepSeries transfer_rep_series(const Cocycle& c, long m, const Real& tol,
                              bool inverse_convention) {
  long content = 8;
  for (const auto& fac : c.transfer.factors()) {
    if (const auto* mo = std::get_if<GroupMap::Morphism>(&fac)) {
      content += std::labs(mo->half_degree);
    } else if (const auto* e = std::get_if<GroupMap::Exp>(&fac)) {
      content += 2 * e->generator.half_band();
    }
  }
  content *= m;  // degree-m representation multiplies frequencies
  std::size_t grid = next_pow2(static_cast<std::size_t>(2 * content + 64));
  const std::size_t cap = 1u << 16;
  for (;; grid <<= 1) {
    if (grid > cap)
      throw EstimateViolation("transfer_rep_series: bandwidth overflow");
    auto samples = c.transfer.sample_grid(grid);
    std::vector<std::vector<Complex>> entries(
        static_cast<std::size_t>((m + 1) * (m + 1)));
    for (auto& v : entries) v.assign(grid, Complex::zero());
    for (std::size_t g = 0; g < grid; ++g) {
      GroupElement s = inverse_convention ? samples[g] : samples[g].inverse();
      RepMatrix rep = representation_matrix(s, m);
      for (std::size_t e = 0; e < rep.e.size(); ++e) entries[e][g] = rep.e[e];
    }
    for (auto& v : entries) fft::transform(v, false);
    Real inv = Real(1L) / Real(static_cast<long>(grid));
    long half = static_cast<long>(grid) / 2;
    long keep = half / 2;
    // Integer frequencies live on even bins of the two-period grid.
    RepSeries out;
    out.m = m;
    out.band = keep / 2;
    out.coeff.assign(2 * out.band + 1, RepMatrix{});
    Real discarded(0L);
    for (long nu2 = -half + 1; nu2 <= half; ++nu2) {
      std::size_t bin = static_cast<std::size_t>(
          (nu2 % static_cast<long>(grid) + static_cast<long>(grid)) %
          static_cast<long>(grid));
      Real mass(0L);
      for (auto& v : entries) {
        Real mag = abs(inv * v[bin]);
        if (mag > mass) mass = mag;
      }
      bool keep_this = (nu2 % 2 == 0) && std::labs(nu2 / 2) <= out.band;
      if (!keep_this) {
        if (mass > discarded) discarded = mass;
      }
    }
    if (discarded > tol) continue;
    for (long nu = -out.band; nu <= out.band; ++nu) {
      RepMatrix rm;
      rm.m = m;
      rm.e.assign(static_cast<std::size_t>((m + 1) * (m + 1)), Complex::zero());
      std::size_t bin = static_cast<std::size_t>(
          ((2 * nu) % static_cast<long>(grid) + static_cast<long>(grid)) %
          static_cast<long>(grid));
      for (std::size_t e = 0; e < rm.e.size(); ++e)
        rm.e[e] = inv * entries[e][bin];
      out.coeff[nu + out.band] = std::move(rm);
    }
    out.aliasing = discarded;
    // Trim negligible outer coefficients.
    while (out.band > 0) {
      Real edge(0L);
      for (const auto& entry : out.coeff.front().e) edge = max(edge, abs(entry));
      for (const auto& entry : out.coeff.back().e) edge = max(edge, abs(entry));
      if (edge > tol) break;
      out.coeff.erase(out.coeff.begin());
      out.coeff.pop_back();
      --out.band;
    }
    return out;
  }
}

KoopmanResult koopman_apply(const Cocycle& c, const FiberFunction& f,
                            long n_trunc, const KoopmanOptions& opts) {
  const long m = f.degree();
  Real tol = opts.series_tol.is_zero()
                 ? Real::pow2(-(5 * working_precision() / 8))
                 : opts.series_tol;
  RepSeries series = transfer_rep_series(c, m, tol, opts.inverse_convention);
  long out_band = n_trunc;
  long full_band = f.band() + series.band;
  FiberFunction out(m, out_band);
  Real leaked(0L);
  Real sign = opts.inverse_convention ? Real(1L) : Real(-1L);
  // pi^{j,p}(R S) = sum_l pi^{l,p}(R) pi^{j,l}(S): the transfer contracts
  // the second lower index, the first one rides along.
  for (long kk = -full_band; kk <= full_band; ++kk) {
    bool keep = std::labs(kk) <= out_band;
    for (long j = 0; j <= m; ++j) {
      for (long l = 0; l <= m; ++l) {
        Complex acc = Complex::zero();
        for (long k = std::max(-f.band(), kk - series.band);
             k <= std::min(f.band(), kk + series.band); ++k) {
          long nu = kk - k;
          Complex phase = Complex::unit(sign * Real(k) * c.alpha);
          const RepMatrix& rm = series.coeff[nu + series.band];
          Complex inner = Complex::zero();
          for (long p = 0; p <= m; ++p) {
            inner += rm.at(p, l) * f.coeff(k, j, p);
          }
          acc += phase * inner;
        }
        if (keep) {
          out.set_coeff(kk, j, l, acc);
        } else {
          leaked += norm2(acc);
        }
      }
    }
  }
  return {std::move(out), sqrt(leaked)};
}

std::vector<Complex> constant_eigenvalue_seeds(const Real& alpha, const Real& a,
                                               long m, long n_trunc) {
  std::vector<Complex> out;
  for (long k = -n_trunc; k <= n_trunc; ++k) {
    for (long p = 0; p <= m; ++p) {
      out.push_back(Complex::unit(-(Real(k) * alpha + Real(m - 2 * p) * a)));
    }
  }
  return out;
}

namespace {

// Dense LU solve; returns false on a (numerically) singular pivot.
bool lu_solve(std::vector<Complex>& a, std::size_t n, std::vector<Complex>& b,
              const Real& pivot_floor) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    Real best = norm2(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Real v = norm2(a[r * n + col]);
      if (v > best) { best = v; piv = r; }
    }
    if (best < pivot_floor * pivot_floor) return false;
    if (piv != col) {
      for (std::size_t cc = 0; cc < n; ++cc)
        std::swap(a[col * n + cc], a[piv * n + cc]);
      std::swap(b[col], b[piv]);
    }
    Complex d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      Complex fctr = a[r * n + col] / d;
      if (fctr.is_zero()) continue;
      for (std::size_t cc = col; cc < n; ++cc)
        a[r * n + cc] = a[r * n + cc] - fctr * a[col * n + cc];
      b[r] = b[r] - fctr * b[col];
    }
  }
  for (std::size_t ri = n; ri-- > 0;) {
    Complex acc = b[ri];
    for (std::size_t cc = ri + 1; cc < n; ++cc)
      acc = acc - a[ri * n + cc] * b[cc];
    b[ri] = acc / a[ri * n + ri];
  }
  return true;
}

}  // namespace

std::vector<EigenPoint> eigen_search(const Cocycle& c, long m, long n_trunc,
                                     const std::vector<Complex>& extra_lambdas,
                                     const EigenSearchOptions& opts) {
  if (m < 1) throw PreconditionError("eigen_search requires m >= 1");
  Real tol = opts.series_tol.is_zero()
                 ? Real::pow2(-(5 * working_precision() / 8))
                 : opts.series_tol;
  RepSeries series = transfer_rep_series(c, m, tol, false);

  // Lambda grid: Lemma seeds of the constant part plus a uniform circle.
  std::vector<Complex> lambdas = extra_lambdas;
  {
    auto split = split_constant(c.transfer, tol);
    Real a = diagonalize(split.a0).angle;
    auto seeds = constant_eigenvalue_seeds(c.alpha, a, m, n_trunc);
    lambdas.insert(lambdas.end(), seeds.begin(), seeds.end());
    for (std::size_t i = 0; i < opts.circle_grid; ++i) {
      lambdas.push_back(Complex::unit(Real(static_cast<long>(i)) /
                                      Real(static_cast<long>(opts.circle_grid))));
    }
  }

  const long rows_k = 2 * n_trunc + 1;
  const std::size_t block = static_cast<std::size_t>(rows_k * (m + 1));
  bool diagonal_case = series.band == 0;
  if (diagonal_case) {
    const RepMatrix& r0 = series.coeff[0];
    for (long pp = 0; pp <= m && diagonal_case; ++pp)
      for (long j = 0; j <= m && diagonal_case; ++j)
        if (pp != j && abs(r0.at(pp, j)) > Real(1e-30)) diagonal_case = false;
  }
  // Guard the dense path at desk scale.
  if (!diagonal_case && block > 512) {
    throw PreconditionError(
        "eigen_search: truncation too large for the dense path");
  }

  // Diagonal entries (constant transfer) or dense blocks per p.
  std::vector<EigenPoint> out;
  out.reserve(lambdas.size());
  if (diagonal_case) {
    // U e_{k,j,p} has matrix elements r0(l,j) e^{-2 pi i k alpha} on (k,l,p);
    // for a diagonal constant transfer the operator is diagonal and the
    // singular values of (U - lambda) are the distances |mu - lambda| over
    // its spectrum.
    const RepMatrix& r0 = series.coeff[0];
    for (const auto& lam : lambdas) {
      Real best(-1L);
      for (long k = -n_trunc; k <= n_trunc; ++k) {
        Complex ph = Complex::unit(-Real(k) * c.alpha);
        for (long j = 0; j <= m; ++j) {
          Real d = abs(ph * r0.at(j, j) - lam);
          if (best < Real(0L) || d < best) best = d;
        }
      }
      out.push_back({lam, best});
    }
    return out;
  }

  // Dense inverse iteration per j-block (the operator does not touch the
  // first lower index; one block suffices).
  std::vector<Complex> base(block * block, Complex::zero());
  auto row_of = [&](long k, long l) {
    return static_cast<std::size_t>((k + n_trunc) * (m + 1) + l);
  };
  for (long kk = -n_trunc; kk <= n_trunc; ++kk) {
    for (long l = 0; l <= m; ++l) {
      for (long k = std::max(-n_trunc, kk - series.band);
           k <= std::min(n_trunc, kk + series.band); ++k) {
        Complex phase = Complex::unit(-Real(k) * c.alpha);
        const RepMatrix& rm = series.coeff[kk - k + series.band];
        for (long p = 0; p <= m; ++p) {
          base[row_of(kk, l) * block + row_of(k, p)] += rm.at(p, l) * phase;
        }
      }
    }
  }
  Real pivot_floor = Real::pow2(-(working_precision() - 16));
  for (const auto& lam : lambdas) {
    std::vector<Complex> mat = base;
    for (std::size_t i = 0; i < block; ++i)
      mat[i * block + i] = mat[i * block + i] - lam;
    // Inverse power iteration on (M^H M): v <- M^-1 (M^H)^-1 v. The start
    // vector must be random: the operator preserves resonance chains in
    // (k, p), so structured starts can be blind to the minimal subspace.
    std::vector<Complex> mh(block * block);
    for (std::size_t r = 0; r < block; ++r)
      for (std::size_t cidx = 0; cidx < block; ++cidx)
        mh[r * block + cidx] = conj(mat[cidx * block + r]);
    std::mt19937_64 rng(0x5eedULL + block);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Complex> v(block);
    for (auto& x : v) x = Complex(Real(uni(rng)), Real(uni(rng)));
    Real sigma(0L);
    bool singular = false;
    for (int it = 0; it < opts.power_iterations; ++it) {
      std::vector<Complex> a1 = mh;
      std::vector<Complex> b = v;
      if (!lu_solve(a1, block, b, pivot_floor)) { singular = true; break; }
      std::vector<Complex> a2 = mat;
      if (!lu_solve(a2, block, b, pivot_floor)) { singular = true; break; }
      Real nb(0L);
      for (const auto& x : b) nb += norm2(x);
      nb = sqrt(nb);
      sigma = Real(1L) / sqrt(nb);
      Real inv = Real(1L) / nb;
      for (std::size_t i = 0; i < block; ++i) v[i] = inv * b[i];
    }
    out.push_back({lam, singular ? Real(0L) : sigma});
  }
  return out;
}

std::vector<CorrelationPoint> correlation_trace(const Cocycle& c,
                                                const FiberFunction& f,
                                                const FiberFunction& g,
                                                long t_max, std::size_t grid) {
  if (f.degree() != g.degree())
    throw PreconditionError("correlation_trace: mismatched degrees");
  const long m = f.degree();
  const Real inv_grid = Real(1L) / Real(static_cast<long>(grid));

  // Precompute g's pointwise values sum_k g^k_{l,p} e^{2 pi i k x}.
  std::vector<std::vector<Complex>> g_vals(grid);
  std::vector<Real> xs(grid, Real(0L));
  for (std::size_t gi = 0; gi < grid; ++gi) {
    xs[gi] = Real(static_cast<long>(gi)) * inv_grid;
    g_vals[gi].assign((m + 1) * (m + 1), Complex::zero());
    for (long l = 0; l <= m; ++l)
      for (long p = 0; p <= m; ++p) {
        Complex acc = Complex::zero();
        for (long k = -g.band(); k <= g.band(); ++k)
          acc += g.coeff(k, l, p) * Complex::unit(Real(k) * xs[gi]);
        g_vals[gi][l * (m + 1) + p] = acc;
      }
  }

  // Per grid point: orbit state, f's phase registers, base-point tracker.
  struct PointState {
    GroupElement s;                // A~_n(x) accumulated
    std::vector<Complex> phases;   // e^{2 pi i k (x - n alpha)} per k slot
    Real y;                        // x - n alpha reduced mod 1
  };
  std::vector<PointState> st(grid);
  std::vector<Complex> alpha_steps(2 * f.band() + 1);
  for (long k = -f.band(); k <= f.band(); ++k)
    alpha_steps[k + f.band()] = Complex::unit(-Real(k) * c.alpha);
  for (std::size_t gi = 0; gi < grid; ++gi) {
    st[gi].s = GroupElement::identity();
    st[gi].y = xs[gi];
    st[gi].phases.assign(2 * f.band() + 1, Complex::zero());
    for (long k = -f.band(); k <= f.band(); ++k)
      st[gi].phases[k + f.band()] = Complex::unit(Real(k) * xs[gi]);
  }

  std::vector<CorrelationPoint> out;
  out.reserve(t_max);
  Real cesaro_acc(0L);
  for (long n = 1; n <= t_max; ++n) {
    Complex corr = Complex::zero();
    for (std::size_t gi = 0; gi < grid; ++gi) {
      PointState& ps = st[gi];
      // A~_n(x) = A~_{n-1}(x) A(x - (n-1) alpha).
      ps.s = ps.s * c.transfer.evaluate(ps.y);
      ps.y -= c.alpha;
      if (ps.y < Real(0L)) ps.y += Real(1L);
      for (long k = -f.band(); k <= f.band(); ++k)
        ps.phases[k + f.band()] =
            ps.phases[k + f.band()] * alpha_steps[k + f.band()];
      RepMatrix rep = representation_matrix(ps.s.inverse(), m);
      // f(y, RS) expands as sum_{j,l} [sum_p rep(p,l) phi_{j,p}(y)] pi^{j,l};
      // pairing against g picks the conjugate (j,l) value at x.
      Complex val = Complex::zero();
      for (long j = 0; j <= m; ++j) {
        for (long l = 0; l <= m; ++l) {
          Complex gc = conj(g_vals[gi][j * (m + 1) + l]);
          if (gc.is_zero()) continue;
          Complex inner = Complex::zero();
          for (long p = 0; p <= m; ++p) {
            Complex fj = Complex::zero();
            for (long k = -f.band(); k <= f.band(); ++k) {
              Complex fc = f.coeff(k, j, p);
              if (!fc.is_zero()) fj += fc * ps.phases[k + f.band()];
            }
            inner += rep.at(p, l) * fj;
          }
          val += inner * gc;
        }
      }
      corr += val;
    }
    corr = inv_grid * corr;
    cesaro_acc += norm2(corr);
    CorrelationPoint pt;
    pt.n = n;
    pt.correlation = corr;
    pt.cesaro = cesaro_acc / Real(n);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace kamlab
