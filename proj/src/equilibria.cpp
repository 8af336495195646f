#include "urnsim/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "urnsim/linalg.hpp"

namespace urnsim {

namespace {

constexpr double kBisectWidth = 1e-12;   // scalar root interval width
constexpr double kEndpointTol = 1e-13;   // |phi| treated as an endpoint root
constexpr double kResidualBound = 1e-9;  // reported bound on ||F||_inf
constexpr double kDedupTol = 1e-7;       // component tolerance for identical zeros
constexpr double kGroupTol = 1e-9;       // components closer than this share a group
constexpr int kScanCells = 4096;

using ScalarFn = std::function<double(double)>;

// Bisection on a bracketing interval; assumes fn(lo) and fn(hi) have opposite
// signs (or one of them vanishes).
double bisect(const ScalarFn& fn, double lo, double hi) {
    double flo = fn(lo);
    if (flo == 0.0) return lo;
    if (fn(hi) == 0.0) return hi;
    for (int it = 0; it < 200 && hi - lo > kBisectWidth; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> dedupe_sorted(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

} // namespace

std::string to_string(ZeroKind k) {
    return k == ZeroKind::Synchronization ? "synchronization" : "no-synchronization";
}

int ZeroPoint::n() const {
    int total = 0;
    for (const auto& g : groups) total += g.count;
    return total;
}

std::vector<double> ZeroPoint::expand() const {
    std::vector<double> z;
    z.reserve(n());
    for (const auto& g : groups) z.insert(z.end(), g.count, g.value);
    return z;
}

std::vector<double> drift(const ModelParams& p, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != p.n_agents)
        throw std::invalid_argument("drift: z length must equal N");
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= p.n_agents;
    const double shared = p.alpha * mean + p.beta * p.q;
    std::vector<double> out(z.size());
    for (std::size_t h = 0; h < z.size(); ++h)
        out[h] = shared + p.weight() * p.f.eval(z[h]) - z[h];
    return out;
}

double drift_sup_norm(const ModelParams& p, const std::vector<double>& z) {
    double m = 0.0;
    for (double v : drift(p, z)) m = std::max(m, std::abs(v));
    return m;
}

double sync_residual(const ModelParams& p, double z) {
    const double w = p.weight();
    return p.f.eval(z) - (1.0 - p.alpha) / w * z + p.beta * p.q / w;
}

namespace {

// --- construction of polished ZeroPoints ------------------------------------

// Drift restricted to group coordinates: G_i(v) for groups (v_i, c_i).
std::vector<double> group_drift(const ModelParams& p, const std::vector<double>& v,
                                const std::vector<int>& counts) {
    double mean = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) mean += counts[i] * v[i];
    mean /= p.n_agents;
    const double shared = p.alpha * mean + p.beta * p.q;
    std::vector<double> g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        g[i] = shared + p.weight() * p.f.eval(v[i]) - v[i];
    return g;
}

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Damped Newton on the group-restricted drift. Values stay clamped to [0,1];
// zeros at the boundary (LP with beta = 0) are fixed points of the update.
void polish_groups(const ModelParams& p, std::vector<double>& v,
                   const std::vector<int>& counts) {
    const int k = static_cast<int>(v.size());
    std::vector<double> g = group_drift(p, v, counts);
    for (int iter = 0; iter < 50 && sup_norm(g) > 1e-13; ++iter) {
        std::vector<double> jac(static_cast<std::size_t>(k) * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                jac[i * k + j] = p.alpha * counts[j] / p.n_agents;
                if (i == j) jac[i * k + j] += p.weight() * p.f.deriv(v[i]) - 1.0;
            }
        std::vector<double> rhs(k), dv;
        for (int i = 0; i < k; ++i) rhs[i] = -g[i];
        if (!lu_solve(jac, k, rhs, dv)) break;

        const double base = sup_norm(g);
        double t = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            std::vector<double> trial(v);
            for (int i = 0; i < k; ++i)
                trial[i] = std::min(1.0, std::max(0.0, v[i] + t * dv[i]));
            std::vector<double> gt = group_drift(p, trial, counts);
            if (sup_norm(gt) < base) {
                v = std::move(trial);
                g = std::move(gt);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
}

ZeroPoint make_zero(const ModelParams& p, std::vector<double> values,
                    std::vector<int> counts) {
    polish_groups(p, values, counts);

    // Sort groups by value and merge collisions the polish may have produced.
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    ZeroPoint zp;
    for (std::size_t idx : order) {
        if (!zp.groups.empty() && values[idx] - zp.groups.back().value <= kGroupTol)
            zp.groups.back().count += counts[idx];
        else
            zp.groups.push_back({values[idx], counts[idx]});
    }
    zp.kind = zp.groups.size() == 1 ? ZeroKind::Synchronization
                                    : ZeroKind::NoSynchronization;
    const std::vector<double> z = zp.expand();
    zp.residual = drift_sup_norm(p, z);
    zp.spectrum = spectrum_at(p, z);
    zp.stability = classify(zp.spectrum);
    return zp;
}

ZeroPoint make_sync_zero(const ModelParams& p, double value) {
    return make_zero(p, {value}, {p.n_agents});
}

bool same_zero(const ZeroPoint& a, const ZeroPoint& b) {
    if (a.groups.size() != b.groups.size()) return false;
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        if (a.groups[i].count != b.groups[i].count) return false;
        if (std::abs(a.groups[i].value - b.groups[i].value) > kDedupTol) return false;
    }
    return true;
}

void sort_and_dedupe(std::vector<ZeroPoint>& zeros) {
    std::sort(zeros.begin(), zeros.end(), [](const ZeroPoint& a, const ZeroPoint& b) {
        return a.expand() < b.expand();
    });
    std::vector<ZeroPoint> out;
    for (auto& z : zeros) {
        if (!out.empty() && same_zero(out.back(), z)) {
            if (z.residual < out.back().residual) out.back() = std::move(z);
        } else {
            out.push_back(std::move(z));
        }
    }
    zeros = std::move(out);
}

// --- the LP quadratic --------------------------------------------------------

std::vector<double> lp_sync_values(const ModelParams& p) {
    const double theta = p.f.theta(), xs = p.f.xstar();
    const double tx = theta * xs;
    if (p.beta == 0.0) {
        if (tx < 1.0) return {0.0, (1.0 - tx) / theta};
        return {0.0};
    }
    // (1-a) th z^2 + [(1-a) th x* - b th q - (1-a-b)] z - b q th x* = 0.
    // C < 0, so the roots straddle zero and the positive one is the zero in (0,1).
    const double A = (1.0 - p.alpha) * theta;
    const double B = (1.0 - p.alpha) * tx - p.beta * theta * p.q - p.weight();
    const double C = -p.beta * p.q * tx;
    const double disc = std::sqrt(B * B - 4.0 * A * C);
    return {(-B + disc) / (2.0 * A)};
}

} // namespace

std::vector<double> sync_zero_values_scan(const ModelParams& p) {
    auto phi = [&](double z) { return sync_residual(p, z); };
    if (std::abs(phi(0.0)) <= kEndpointTol && std::abs(phi(0.5)) <= kEndpointTol &&
        std::abs(phi(1.0)) <= kEndpointTol)
        throw std::invalid_argument("sync_zeros: phi vanishes identically");

    const double delta_u = (1.0 - p.alpha) / p.weight();
    std::vector<double> cuts = p.f.deriv_level_points(delta_u);
    std::vector<double> pts{0.0};
    for (double x : cuts)
        if (x > 0.0 && x < 1.0) pts.push_back(x);
    pts.push_back(1.0);

    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const double fa = phi(a), fb = phi(b);
        if (std::abs(fa) <= kEndpointTol) roots.push_back(a);
        if (std::abs(fb) <= kEndpointTol) roots.push_back(b);
        if (std::abs(fa) > kEndpointTol && std::abs(fb) > kEndpointTol &&
            (fa < 0.0) != (fb < 0.0))
            roots.push_back(bisect(phi, a, b));
    }
    return dedupe_sorted(std::move(roots), kDedupTol);
}

std::vector<ZeroPoint> sync_zeros(const ModelParams& p) {
    std::vector<double> values = p.f.kind() == FunctionKind::LP
                                     ? lp_sync_values(p)
                                     : sync_zero_values_scan(p);
    values = dedupe_sorted(std::move(values), kDedupTol);
    std::vector<ZeroPoint> zeros;
    zeros.reserve(values.size());
    for (double v : values) zeros.push_back(make_sync_zero(p, v));
    sort_and_dedupe(zeros);
    return zeros;
}

namespace {

// Shared state of the two-group construction: the critical abscissas, the
// admissible offset interval and the branch inverses of g = f - id/w.
struct BranchSolver {
    const ModelParams& p;
    double x1, x2;     // the two solutions of f' = 1/w
    double clo, chi;   // admissible interval for the offset c

    double g(double z) const { return p.f.eval(z) - z / p.weight(); }
    // Monotone restrictions: decreasing on [0,x1] and [x2,1], increasing between.
    double zeta1(double c) const {
        return bisect([&](double z) { return g(z) - c; }, 0.0, x1);
    }
    double zeta2(double c) const {
        return bisect([&](double z) { return c - g(z); }, x1, x2);
    }
    double zeta3(double c) const {
        return bisect([&](double z) { return g(z) - c; }, x2, 1.0);
    }
};

} // namespace

std::vector<ZeroPoint> nosync_zeros(const ModelParams& p, bool include_unstable_middle) {
    std::vector<ZeroPoint> zeros;
    if (p.n_agents < 2) return zeros;

    const double w = p.weight();
    const double delta_s = 1.0 / w;
    if (std::abs(p.f.max_deriv() - delta_s) <= 1e-10) return zeros; // tangency
    const std::vector<double> xs = p.f.deriv_level_points(delta_s);
    if (xs.size() < 2) return zeros;
    if (xs.size() > 2)
        throw std::invalid_argument(
            "nosync_zeros: enumeration requires f' to cross the critical level at most twice");

    BranchSolver br{p, xs[0], xs[1], 0.0, 0.0};
    br.clo = std::max(br.g(br.x1), -(p.alpha + p.beta) / w);
    br.chi = std::min(br.g(br.x2), 0.0);
    if (!(br.clo < br.chi)) return zeros;

    // Stay strictly inside the admissible interval so the branch brackets hold.
    const double span = br.chi - br.clo;
    const double lo = br.clo + 1e-12 * span, hi = br.chi - 1e-12 * span;

    // The branch values depend only on c, not on the group sizes, so tabulate
    // them once over the scan grid.
    std::vector<double> cg(kScanCells + 1), z1g(kScanCells + 1), z2g(kScanCells + 1),
        z3g(kScanCells + 1);
    for (int k = 0; k <= kScanCells; ++k) {
        const double c = lo + (hi - lo) * k / kScanCells;
        cg[k] = c;
        z1g[k] = br.zeta1(c);
        z3g[k] = br.zeta3(c);
        if (include_unstable_middle) z2g[k] = br.zeta2(c);
    }

    // Count vectors (n1, m, n3) over the branches; m = 0 is the two-group case.
    std::vector<std::array<int, 3>> combos;
    for (int n1 = 1; n1 < p.n_agents; ++n1) combos.push_back({n1, 0, p.n_agents - n1});
    if (include_unstable_middle)
        for (int m = 1; m < p.n_agents; ++m)
            for (int n1 = 0; n1 + m <= p.n_agents; ++n1) {
                const int n3 = p.n_agents - m - n1;
                if (n1 + n3 >= 1) combos.push_back({n1, m, n3});
            }

    for (const auto& combo : combos) {
        const int n1 = combo[0], m = combo[1], n3 = combo[2];
        auto balance = [&](double c) {
            double mean = n1 * br.zeta1(c) + n3 * br.zeta3(c);
            if (m > 0) mean += m * br.zeta2(c);
            return p.alpha * mean / p.n_agents + p.beta * p.q + w * c;
        };
        auto balance_grid = [&](int k) {
            double mean = n1 * z1g[k] + n3 * z3g[k];
            if (m > 0) mean += m * z2g[k];
            return p.alpha * mean / p.n_agents + p.beta * p.q + w * cg[k];
        };

        double prev = balance_grid(0);
        for (int k = 1; k <= kScanCells; ++k) {
            const double cur = balance_grid(k);
            double root = 0.0;
            bool have_root = false;
            if (prev == 0.0) {
                root = cg[k - 1];
                have_root = true;
            } else if ((prev < 0.0) != (cur < 0.0)) {
                root = bisect(balance, cg[k - 1], cg[k]);
                have_root = true;
            }
            if (have_root) {
                std::vector<double> values;
                std::vector<int> counts;
                if (n1 > 0) { values.push_back(br.zeta1(root)); counts.push_back(n1); }
                if (m > 0) { values.push_back(br.zeta2(root)); counts.push_back(m); }
                if (n3 > 0) { values.push_back(br.zeta3(root)); counts.push_back(n3); }
                ZeroPoint zp = make_zero(p, std::move(values), std::move(counts));
                if (zp.groups.size() >= 2 && zp.residual <= kResidualBound)
                    zeros.push_back(std::move(zp));
            }
            prev = cur;
        }
    }

    sort_and_dedupe(zeros);
    return zeros;
}

std::vector<ZeroPoint> all_zeros(const ModelParams& p, bool include_unstable_middle) {
    std::vector<ZeroPoint> zeros = sync_zeros(p);
    std::vector<ZeroPoint> ns = nosync_zeros(p, include_unstable_middle);
    zeros.insert(zeros.end(), std::make_move_iterator(ns.begin()),
                 std::make_move_iterator(ns.end()));
    sort_and_dedupe(zeros);
    for (const auto& z : zeros)
        if (!(z.residual <= kResidualBound))
            throw std::logic_error("all_zeros: unpolished zero with residual > 1e-9");
    return zeros;
}

namespace {

// Halton sequence in [0,1]^dim, used as the quasi-random start set.
class Halton {
  public:
    explicit Halton(int dim) {
        static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
        if (dim > 10) throw std::invalid_argument("oracle: N > 10 not supported");
        for (int i = 0; i < dim; ++i) bases_.push_back(primes[i]);
    }
    std::vector<double> next() {
        ++index_;
        std::vector<double> pt(bases_.size());
        for (std::size_t i = 0; i < bases_.size(); ++i) {
            double f = 1.0, r = 0.0;
            for (long n = index_; n > 0; n /= bases_[i]) {
                f /= bases_[i];
                r += f * (n % bases_[i]);
            }
            pt[i] = r;
        }
        return pt;
    }

  private:
    std::vector<int> bases_;
    long index_ = 0;
};

// Projected damped Newton on the full drift; falls back to a plain drift
// step (the descent direction of the potential) when the Jacobian is
// singular. Returns true on ||F||_inf <= 1e-10.
bool newton_full(const ModelParams& p, std::vector<double>& z) {
    const int n = p.n_agents;
    std::vector<double> fz = drift(p, z);
    for (int iter = 0; iter < 80; ++iter) {
        const double base = sup_norm(fz);
        if (base <= 1e-10) return true;

        const JacobianSpec spec = jacobian(p, z);
        std::vector<double> rhs(n), dz;
        for (int i = 0; i < n; ++i) rhs[i] = -fz[i];
        if (!lu_solve(spec.dense(), n, rhs, dz)) dz = fz;

        double t = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 25; ++ls, t *= 0.5) {
            std::vector<double> trial(z);
            for (int i = 0; i < n; ++i)
                trial[i] = std::min(1.0, std::max(0.0, z[i] + t * dz[i]));
            std::vector<double> ft = drift(p, trial);
            if (sup_norm(ft) < base) {
                z = std::move(trial);
                fz = std::move(ft);
                improved = true;
                break;
            }
        }
        if (!improved) return sup_norm(fz) <= 1e-10;
    }
    return sup_norm(fz) <= 1e-10;
}

} // namespace

std::vector<ZeroPoint> oracle_zeros(const ModelParams& p, int n_starts) {
    Halton seq(p.n_agents);
    std::vector<std::vector<double>> found; // canonical sorted component vectors

    for (int s = 0; s < n_starts; ++s) {
        std::vector<double> z = seq.next();
        if (!newton_full(p, z)) continue;
        std::sort(z.begin(), z.end());
        bool known = false;
        for (const auto& other : found) {
            double diff = 0.0;
            for (int i = 0; i < p.n_agents; ++i)
                diff = std::max(diff, std::abs(z[i] - other[i]));
            if (diff <= 1e-6) { known = true; break; }
        }
        if (!known) found.push_back(std::move(z));
    }

    std::vector<ZeroPoint> zeros;
    for (const auto& z : found) {
        std::vector<double> values;
        std::vector<int> counts;
        for (double v : z) {
            if (!values.empty() && v - values.back() <= kGroupTol)
                ++counts.back();
            else {
                values.push_back(v);
                counts.push_back(1);
            }
        }
        ZeroPoint zp = make_zero(p, std::move(values), std::move(counts));
        if (zp.residual <= kResidualBound) zeros.push_back(std::move(zp));
    }
    sort_and_dedupe(zeros);
    return zeros;
}

std::vector<ZeroPoint> all_zeros_verified(const ModelParams& p,
                                          bool include_unstable_middle, int n_starts) {
    std::vector<ZeroPoint> zeros = all_zeros(p, include_unstable_middle);
    for (const auto& oz : oracle_zeros(p, n_starts)) {
        const std::vector<double> ov = oz.expand();
        double best = 1e9;
        for (const auto& sz : zeros) {
            const std::vector<double> sv = sz.expand();
            double diff = 0.0;
            for (std::size_t i = 0; i < ov.size(); ++i)
                diff = std::max(diff, std::abs(ov[i] - sv[i]));
            best = std::min(best, diff);
        }
        if (best > 1e-6)
            throw std::logic_error(
                "all_zeros_verified: oracle found a zero absent from the enumeration");
    }
    return zeros;
}

std::pair<double, double> restriction_bounds(const ModelParams& p, double z1, double z3) {
    if (!(z1 < z3))
        throw std::invalid_argument("restriction_bounds: need z1 < z3");
    const double w = p.weight();
    return {-(1.0 - p.alpha) + w * p.f.deriv(z3), 1.0 - w * p.f.deriv(z1)};
}

CriticalAbscissas critical_abscissas(const ModelParams& p) {
    CriticalAbscissas ca;
    ca.xhat = p.f.deriv_level_points((1.0 - p.alpha) / p.weight());
    ca.xstar12 = p.f.deriv_level_points(1.0 / p.weight());
    return ca;
}

EquilibriaDiagnostics diagnostics(const ModelParams& p) {
    EquilibriaDiagnostics d;
    d.abscissas = critical_abscissas(p);

    const double w = p.weight();
    const double delta_u = (1.0 - p.alpha) / w;
    const double delta_s = 1.0 / w;
    const double peak = p.f.max_deriv();
    const double edge = std::max(p.f.deriv(0.0), p.f.deriv(1.0));

    d.flags.u1 = peak <= delta_u;
    d.flags.u2 = !d.flags.u1 && edge >= delta_u;
    if (!d.flags.u1 && !d.flags.u2 && d.abscissas.xhat.size() == 2) {
        const double x1 = d.abscissas.xhat[0], x2 = d.abscissas.xhat[1];
        d.flags.u3 = sync_residual(p, x1) > 0.0 || sync_residual(p, x2) < 0.0;
    }

    d.flags.s1 = peak <= delta_s;
    d.flags.s2 = !d.flags.s1 && edge >= delta_s;
    bool complementary = false;
    if (!d.flags.s1 && !d.flags.s2 && d.abscissas.xstar12.size() == 2) {
        const double x1 = d.abscissas.xstar12[0], x2 = d.abscissas.xstar12[1];
        const double g1 = p.f.eval(x1) - x1 / w;
        const double g2 = p.f.eval(x2) - (x2 - (p.alpha + p.beta)) / w;
        d.flags.s3 = g1 >= 0.0 || g2 <= 0.0;
        complementary = g1 < 0.0 && g2 > 0.0;
    }
    d.flags.cond_cs = w * (p.f.deriv(0.0) + p.f.deriv(1.0)) >= 2.0 - p.alpha;
    d.flags.s4 = complementary && d.flags.cond_cs;

    d.half_is_zero = std::abs(sync_residual(p, 0.5)) <= 1e-12;
    d.degenerate = std::abs(peak - delta_s) <= 1e-10;
    return d;
}

std::vector<ZeroPoint> exclude_unstable(const ModelParams& p,
                                        std::vector<ZeroPoint> zeros) {
    const bool interior = p.f.eval(0.0) > 0.0 && p.f.eval(1.0) < 1.0;
    if (interior) {
        std::vector<ZeroPoint> kept;
        for (auto& z : zeros)
            if (!is_unstable(z.stability)) kept.push_back(std::move(z));
        return kept;
    }
    // f reaches the boundary (LP): the no-convergence argument does not apply,
    // but the zero at the origin is escaped under any nonzero start.
    for (auto& z : zeros) {
        bool at_origin = true;
        for (const auto& g : z.groups) at_origin = at_origin && g.value <= 1e-12;
        if (at_origin && is_unstable(z.stability)) z.excluded_given_nonzero_start = true;
    }
    return zeros;
}

double sorted_distance(const std::vector<double>& z, const ZeroPoint& zero) {
    std::vector<double> a(z);
    std::sort(a.begin(), a.end());
    const std::vector<double> b = zero.expand();
    if (a.size() != b.size())
        throw std::invalid_argument("sorted_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

void assign_nearest(ReplicationReport& report, const std::vector<ZeroPoint>& zeros,
                    double radius) {
    report.assigned_zero.reset();
    if (zeros.empty()) return;
    int best = 0;
    double best_d = sorted_distance(report.terminal.z, zeros[0]);
    for (std::size_t i = 1; i < zeros.size(); ++i) {
        const double d = sorted_distance(report.terminal.z, zeros[i]);
        if (d < best_d) { best_d = d; best = static_cast<int>(i); }
    }
    report.distance_to_zero = best_d;
    if (best_d <= radius) report.assigned_zero = best;
}

} // namespace urnsim
