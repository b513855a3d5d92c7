#include <grafkit/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

namespace grafkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Empty-column seed for the distance transform. Finite so parabola
// intersections never produce inf - inf, yet far above any real squared
// distance on a raster grid.
constexpr double kFar = 1e20;

// Felzenszwalb-Huttenlocher 1D squared distance transform. Exact for the
// integer-valued inputs produced by the grid passes below.
void dt_1d(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
           std::vector<double>& z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
    }
}

// Exact squared Euclidean distance from every grid cell to the nearest
// foreground pixel of `mask`.
std::vector<double> squared_edt(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<double> dist(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            dist[static_cast<std::size_t>(y) * w + x] = mask.at(x, y) ? 0.0 : kFar;
        }
    }
    const int nmax = std::max(w, h);
    std::vector<double> f(nmax), d(nmax), z(nmax + 1);
    std::vector<int> v(nmax);

    for (int x = 0; x < w; ++x) { // columns
        for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
        dt_1d(f, d, v, z, h);
        for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = d[y];
    }
    for (int y = 0; y < h; ++y) { // rows
        for (int x = 0; x < w; ++x) f[x] = dist[static_cast<std::size_t>(y) * w + x];
        dt_1d(f, d, v, z, w);
        for (int x = 0; x < w; ++x) dist[static_cast<std::size_t>(y) * w + x] = d[x];
    }
    return dist;
}

double directed_hausdorff_sq(const BinaryMask& from, const std::vector<double>& toEdt) {
    double worst = 0.0;
    const int w = from.width();
    for (int y = 0; y < from.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            if (from.at(x, y)) {
                worst = std::max(worst, toEdt[static_cast<std::size_t>(y) * w + x]);
            }
        }
    }
    return worst;
}

Stat fold_stat(const std::vector<double>& values, StdMode mode) {
    Stat s;
    s.n = static_cast<int>(values.size());
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.n;
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    const int divisor = mode == StdMode::population ? s.n : std::max(1, s.n - 1);
    s.stddev = std::sqrt(sq / divisor);
    return s;
}

AngleSummary fold_angle(const std::vector<double>& errors,
                        const std::vector<double>& predicted,
                        const std::vector<double>& truth,
                        const SummaryThresholds& thresholds, StdMode mode) {
    AngleSummary out;
    out.error = fold_stat(errors, mode);
    if (errors.empty()) return out;

    std::size_t success = 0, poor = 0;
    for (double e : errors) {
        if (e < thresholds.success_deg) ++success;
        if (e > thresholds.poor_deg) ++poor;
    }
    out.success_rate = static_cast<double>(success) / errors.size();
    out.poor_rate = static_cast<double>(poor) / errors.size();

    std::vector<double> sorted(errors);
    std::sort(sorted.begin(), sorted.end());
    out.cdf.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        out.cdf.emplace_back(sorted[i],
                             static_cast<double>(i + 1) / static_cast<double>(sorted.size()));
    }
    if (predicted.size() >= 2) out.pearson = pearson(predicted, truth);
    return out;
}

} // namespace

double dsc(const BinaryMask& x, const BinaryMask& y) {
    if (!x.same_size(y)) throw DimensionError("dsc: masks differ in dimensions");
    std::size_t inter = 0, nx = 0, ny = 0;
    const auto& bx = x.bits();
    const auto& by = y.bits();
    for (std::size_t i = 0; i < bx.size(); ++i) {
        nx += bx[i];
        ny += by[i];
        inter += bx[i] & by[i];
    }
    if (nx + ny == 0) return 1.0; // agreement on emptiness
    return 2.0 * static_cast<double>(inter) / static_cast<double>(nx + ny);
}

double hausdorff(const BinaryMask& x, const BinaryMask& y) {
    if (!x.same_size(y)) throw DimensionError("hausdorff: masks differ in dimensions");
    if (x.empty_foreground() || y.empty_foreground()) {
        throw EmptyMaskError("hausdorff: undefined for an empty mask");
    }
    const std::vector<double> edtX = squared_edt(x);
    const std::vector<double> edtY = squared_edt(y);
    const double worst =
        std::max(directed_hausdorff_sq(x, edtY), directed_hausdorff_sq(y, edtX));
    return std::sqrt(worst);
}

double landmark_error(const LandmarkPoint& predicted, const LandmarkPoint& reference) {
    return std::hypot(predicted.x - reference.x, predicted.y - reference.y);
}

AngleErrors angle_errors(const MeasurementReport& predicted, double alpha_true,
                         double beta_true) {
    return {std::abs(predicted.alpha - alpha_true), std::abs(predicted.beta - beta_true)};
}

EvalSummary summarize(std::span<const EvalRecord> records,
                      const SummaryThresholds& thresholds, StdMode std_mode) {
    if (records.empty()) throw DomainError("summarize: no records");

    EvalSummary out;
    out.n_records = static_cast<int>(records.size());

    std::vector<double> alphaErr, betaErr, alphaPred, alphaTrue, betaPred, betaTrue;
    std::array<std::vector<double>, 4> dscValues, hdValues;
    std::array<std::vector<double>, 3> lmValues;
    std::size_t typed = 0, fn = 0, fp = 0;

    for (const EvalRecord& r : records) {
        if (r.alpha_error) alphaErr.push_back(*r.alpha_error);
        if (r.beta_error) betaErr.push_back(*r.beta_error);
        if (r.alpha_pred && r.alpha_true) {
            alphaPred.push_back(*r.alpha_pred);
            alphaTrue.push_back(*r.alpha_true);
        }
        if (r.beta_pred && r.beta_true) {
            betaPred.push_back(*r.beta_pred);
            betaTrue.push_back(*r.beta_true);
        }
        for (int s = 0; s < 4; ++s) {
            if (r.dsc[s]) dscValues[s].push_back(*r.dsc[s]);
            if (r.hd[s]) hdValues[s].push_back(*r.hd[s]);
        }
        for (int i = 0; i < 3; ++i) {
            if (r.landmark_dist[i]) lmValues[i].push_back(*r.landmark_dist[i]);
        }
        if (r.predicted_type && r.true_type) {
            ++typed;
            if (*r.true_type == GrafType::type_II && *r.predicted_type == GrafType::type_I)
                ++fn;
            if (*r.true_type == GrafType::type_I && *r.predicted_type == GrafType::type_II)
                ++fp;
        }
    }

    out.alpha = fold_angle(alphaErr, alphaPred, alphaTrue, thresholds, std_mode);
    out.beta = fold_angle(betaErr, betaPred, betaTrue, thresholds, std_mode);
    for (int s = 0; s < 4; ++s) {
        if (!dscValues[s].empty()) out.dsc[s] = fold_stat(dscValues[s], std_mode);
        if (!hdValues[s].empty()) out.hd[s] = fold_stat(hdValues[s], std_mode);
    }
    for (int i = 0; i < 3; ++i) {
        if (!lmValues[i].empty()) out.landmark[i] = fold_stat(lmValues[i], std_mode);
    }
    if (typed > 0) {
        out.misclassification.false_negative = static_cast<double>(fn) / typed;
        out.misclassification.false_positive = static_cast<double>(fp) / typed;
        out.misclassification.overall = static_cast<double>(fn + fp) / typed;
    }
    return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw DomainError("pearson: need two equal-length samples of size >= 2");
    }
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa < 1e-24 || sbb < 1e-24) {
        throw DomainError("pearson: undefined for a constant sample");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

TTestResult two_sample_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw DomainError("two_sample_t: each sample needs at least two values");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double ma = 0.0, mb = 0.0;
    for (double v : a) ma += v;
    for (double v : b) mb += v;
    ma /= na;
    mb /= nb;
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);

    TTestResult r;
    r.df = static_cast<int>(na + nb) - 2;
    const double pooled = (va + vb) / r.df;
    if (pooled <= 0.0) {
        if (ma == mb) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = ma > mb ? kInf : -kInf;
            r.p = 0.0;
        }
        return r;
    }
    r.t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
    const boost::math::students_t dist(static_cast<double>(r.df));
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    return r;
}

} // namespace grafkit
