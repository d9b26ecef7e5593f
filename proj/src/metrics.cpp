#include "intensim/metrics.hpp"

#include "intensim/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace intensim {

namespace {

// Neumaier-compensated running sum; fixed order, so results are bit-stable.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

void validate(const SsimConstants& c) {
    if (!(c.c1 > 0.0) || !(c.c2 > 0.0)) throw InvalidArgument("SSIM constants must be positive");
}

void validate(const WindowSpec& w) {
    if (w.size < 1 || w.size % 2 == 0) throw InvalidArgument("window size must be a positive odd integer");
    if (!(w.sigma > 0.0)) throw InvalidArgument("window sigma must be positive");
}

void check_pair(const Image& x, const Image& y, std::string_view metric) {
    require_same_shape(x, y);
    require_unit_range(x, metric);
    require_unit_range(y, metric);
}

nlohmann::json ssim_config(const SsimConstants& c) { return {{"c1", c.c1}, {"c2", c.c2}}; }

nlohmann::json window_config(const SsimConstants& c, const WindowSpec& w) {
    auto j = ssim_config(c);
    j["window"] = w.size;
    j["window_sigma"] = w.sigma;
    return j;
}

// Plain 2-D buffer for intermediate maps; unlike Image it allows any size and value.
struct Plane {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> v;

    Plane(std::size_t w, std::size_t h) : width(w), height(h), v(w * h, 0.0) {}
    explicit Plane(const Image& img)
        : width(img.width()), height(img.height()), v(img.pixels().begin(), img.pixels().end()) {}

    double& at(std::size_t r, std::size_t c) { return v[r * width + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * width + c]; }
};

Plane multiply(const Plane& a, const Plane& b) {
    Plane out(a.width, a.height);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

std::vector<double> gaussian_kernel(const WindowSpec& w) {
    std::vector<double> k(static_cast<std::size_t>(w.size));
    const int half = w.size / 2;
    for (int i = 0; i < w.size; ++i) {
        const double d = i - half;
        k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * w.sigma * w.sigma));
    }
    return k;
}

// Separable Gaussian filter. Taps falling outside the image are dropped and the
// remaining weights renormalized; the 2-D truncated kernel factors, so applying
// the 1-D renormalization per pass is exact.
Plane gaussian_filter(const Plane& in, const std::vector<double>& kernel) {
    const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    const auto w = static_cast<std::ptrdiff_t>(in.width);
    const auto h = static_cast<std::ptrdiff_t>(in.height);

    Plane tmp(in.width, in.height);
    for (std::ptrdiff_t r = 0; r < h; ++r) {
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            double acc = 0.0;
            double norm = 0.0;
            for (std::ptrdiff_t k = -half; k <= half; ++k) {
                const std::ptrdiff_t cc = c + k;
                if (cc < 0 || cc >= w) continue;
                const double kw = kernel[static_cast<std::size_t>(k + half)];
                acc += kw * in.at(static_cast<std::size_t>(r), static_cast<std::size_t>(cc));
                norm += kw;
            }
            tmp.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc / norm;
        }
    }
    Plane out(in.width, in.height);
    for (std::ptrdiff_t r = 0; r < h; ++r) {
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            double acc = 0.0;
            double norm = 0.0;
            for (std::ptrdiff_t k = -half; k <= half; ++k) {
                const std::ptrdiff_t rr = r + k;
                if (rr < 0 || rr >= h) continue;
                const double kw = kernel[static_cast<std::size_t>(k + half)];
                acc += kw * tmp.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(c));
                norm += kw;
            }
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc / norm;
        }
    }
    return out;
}

// Local first and second moments of a pair.
struct LocalStats {
    Plane mu_x, mu_y, var_x, var_y, cov;
};

LocalStats local_stats(const Plane& x, const Plane& y, const std::vector<double>& kernel) {
    LocalStats s{gaussian_filter(x, kernel), gaussian_filter(y, kernel), gaussian_filter(multiply(x, x), kernel),
                 gaussian_filter(multiply(y, y), kernel), gaussian_filter(multiply(x, y), kernel)};
    for (std::size_t i = 0; i < s.mu_x.v.size(); ++i) {
        s.var_x.v[i] -= s.mu_x.v[i] * s.mu_x.v[i];
        s.var_y.v[i] -= s.mu_y.v[i] * s.mu_y.v[i];
        s.cov.v[i] -= s.mu_x.v[i] * s.mu_y.v[i];
    }
    return s;
}

double luminance(double mx, double my, double c1) {
    return (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
}

double contrast_structure(double vx, double vy, double cxy, double c2) {
    return (2.0 * cxy + c2) / (vx + vy + c2);
}

struct MeanMaps {
    double ssim = 0.0;
    double cs = 0.0;
};

// Means of the SSIM map and of the contrast-structure map. The luminance
// statistics come from (lx, ly), the contrast-structure statistics from (sx, sy).
MeanMaps mean_maps(const Plane& lx, const Plane& ly, const Plane& sx, const Plane& sy,
                   const SsimConstants& c, const WindowSpec& window) {
    const auto kernel = gaussian_kernel(window);
    const LocalStats lum = local_stats(lx, ly, kernel);
    const LocalStats str = (&lx == &sx && &ly == &sy) ? lum : local_stats(sx, sy, kernel);
    CompensatedSum ssim_sum;
    CompensatedSum cs_sum;
    for (std::size_t i = 0; i < lum.mu_x.v.size(); ++i) {
        const double l = luminance(lum.mu_x.v[i], lum.mu_y.v[i], c.c1);
        const double cs = contrast_structure(str.var_x.v[i], str.var_y.v[i], str.cov.v[i], c.c2);
        ssim_sum.add(l * cs);
        cs_sum.add(cs);
    }
    const auto n = static_cast<double>(lum.mu_x.v.size());
    return {ssim_sum.value() / n, cs_sum.value() / n};
}

void require_window_fits(const Image& x, const WindowSpec& window, std::string_view metric) {
    validate(window);
    if (static_cast<std::size_t>(window.size) > std::min(x.width(), x.height())) {
        throw InvalidArgument(std::string(metric) + ": window " + std::to_string(window.size) +
                              " is larger than the image (" + std::to_string(x.width()) + "x" +
                              std::to_string(x.height()) + ")");
    }
}

Plane downsample(const Plane& in) {
    Plane out(in.width / 2, in.height / 2);
    for (std::size_t r = 0; r < out.height; ++r) {
        for (std::size_t c = 0; c < out.width; ++c) {
            out.at(r, c) = 0.25 * (in.at(2 * r, 2 * c) + in.at(2 * r, 2 * c + 1) + in.at(2 * r + 1, 2 * c) +
                                   in.at(2 * r + 1, 2 * c + 1));
        }
    }
    return out;
}

// |v|^p with the sign of v, so negative level scores stay real.
double signed_pow(double v, double p) { return std::copysign(std::pow(std::abs(v), p), v); }

Plane sobel_magnitude(const Plane& in) {
    const auto w = static_cast<std::ptrdiff_t>(in.width);
    const auto h = static_cast<std::ptrdiff_t>(in.height);
    auto px = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
        r = std::clamp<std::ptrdiff_t>(r, 0, h - 1);
        c = std::clamp<std::ptrdiff_t>(c, 0, w - 1);
        return in.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    };
    Plane out(in.width, in.height);
    for (std::ptrdiff_t r = 0; r < h; ++r) {
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            const double gx = (px(r - 1, c + 1) + 2.0 * px(r, c + 1) + px(r + 1, c + 1)) -
                              (px(r - 1, c - 1) + 2.0 * px(r, c - 1) + px(r + 1, c - 1));
            const double gy = (px(r + 1, c - 1) + 2.0 * px(r + 1, c) + px(r + 1, c + 1)) -
                              (px(r - 1, c - 1) + 2.0 * px(r - 1, c) + px(r - 1, c + 1));
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

}  // namespace

void to_json(nlohmann::json& j, const MetricResult& r) {
    j = {{"metric", r.metric}, {"score", r.score}, {"config", r.config}};
}

std::string_view to_string(WeightingKind kind) noexcept {
    switch (kind) {
        case WeightingKind::gaussian: return "gaussian";
        case WeightingKind::tanh: return "tanh";
        case WeightingKind::sigmoid: return "sigmoid";
    }
    return "unknown";
}

WeightingKind parse_weighting_kind(std::string_view text) {
    if (text == "gaussian") return WeightingKind::gaussian;
    if (text == "tanh") return WeightingKind::tanh;
    if (text == "sigmoid") return WeightingKind::sigmoid;
    throw InvalidArgument("unknown weighting kind '" + std::string(text) + "'");
}

void WeightingSpec::validate() const {
    switch (kind) {
        case WeightingKind::gaussian:
            if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("gaussian sigma must be positive");
            break;
        case WeightingKind::tanh:
            if (!(slope > 0.0) || !std::isfinite(slope)) throw InvalidArgument("tanh slope must be positive");
            break;
        case WeightingKind::sigmoid:
            if (!(slope > 0.0) || !std::isfinite(slope)) throw InvalidArgument("sigmoid slope must be positive");
            if (!std::isfinite(center)) throw InvalidArgument("sigmoid center must be finite");
            break;
    }
}

std::string WeightingSpec::describe() const {
    std::ostringstream out;
    out << to_string(kind);
    switch (kind) {
        case WeightingKind::gaussian: out << "(sigma=" << sigma << ")"; break;
        case WeightingKind::tanh: out << "(k=" << slope << ")"; break;
        case WeightingKind::sigmoid: out << "(k=" << slope << ",c=" << center << ")"; break;
    }
    return out.str();
}

double weighting_function(double z, const WeightingSpec& spec) {
    if (!(z >= 0.0 && z <= 1.0)) throw InvalidArgument("weighting function argument must lie in [0, 1]");
    switch (spec.kind) {
        case WeightingKind::gaussian: {
            const double d = z - 1.0;
            return std::exp(-(d * d) / (2.0 * spec.sigma * spec.sigma));
        }
        case WeightingKind::tanh: return std::tanh(spec.slope * z);
        case WeightingKind::sigmoid: return 1.0 / (1.0 + std::exp(-spec.slope * (z - spec.center)));
    }
    return 0.0;
}

WeightingFactors weighting_factors(const Image& x, const WeightingSpec& spec) {
    spec.validate();
    require_unit_range(x, "weighting_factors");
    const std::size_t n = x.size();
    std::vector<double> g(n);
    CompensatedSum total;
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = weighting_function(x[i], spec);
        total.add(g[i]);
    }
    const double s = total.value();
    if (!(s > 0.0)) {
        return {std::vector<double>(n, 1.0 / static_cast<double>(n)), true};
    }
    for (double& v : g) v /= s;
    return {std::move(g), false};
}

MetricResult ssim_global(const Image& x, const Image& y, const SsimConstants& c) {
    validate(c);
    check_pair(x, y, "ssim-global");
    const std::size_t n = x.size();
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);
    CompensatedSum vx, vy, cxy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        vx.add(dx * dx);
        vy.add(dy * dy);
        cxy.add(dx * dy);
    }
    const double dof = static_cast<double>(n - 1);
    const double score = luminance(mx, my, c.c1) *
                         contrast_structure(vx.value() / dof, vy.value() / dof, cxy.value() / dof, c.c2);
    return {"ssim-global", clamp_unit(score), ssim_config(c)};
}

MetricResult ssim_windowed(const Image& x, const Image& y, const SsimConstants& c, const WindowSpec& window) {
    validate(c);
    check_pair(x, y, "ssim-windowed");
    require_window_fits(x, window, "ssim-windowed");
    const Plane px(x), py(y);
    const MeanMaps m = mean_maps(px, py, px, py, c, window);
    return {"ssim-windowed", clamp_unit(m.ssim), window_config(c, window)};
}

std::size_t ms_ssim_min_side(int levels, const WindowSpec& window) {
    return static_cast<std::size_t>(window.size) << static_cast<unsigned>(levels - 1);
}

MetricResult ms_ssim(const Image& x, const Image& y, const SsimConstants& c, int levels, const WindowSpec& window) {
    validate(c);
    validate(window);
    check_pair(x, y, "ms-ssim");
    if (levels < 1 || levels > 5) throw InvalidArgument("ms-ssim levels must be between 1 and 5");
    const std::size_t need = ms_ssim_min_side(levels, window);
    if (std::min(x.width(), x.height()) < need) {
        throw InvalidArgument("ms-ssim: image too small for " + std::to_string(levels) + " levels (needs side >= " +
                              std::to_string(need) + ")");
    }
    double weight_sum = 0.0;
    for (int j = 0; j < levels; ++j) weight_sum += kMsSsimExponents[j];

    Plane px(x), py(y);
    double score = 1.0;
    for (int j = 0; j < levels; ++j) {
        const double exponent = kMsSsimExponents[j] / weight_sum;
        const MeanMaps m = mean_maps(px, py, px, py, c, window);
        if (j + 1 == levels) {
            score *= signed_pow(m.ssim, exponent);
        } else {
            score *= signed_pow(m.cs, exponent);
            px = downsample(px);
            py = downsample(py);
        }
    }
    auto config = window_config(c, window);
    config["levels"] = levels;
    return {"ms-ssim", clamp_unit(score), std::move(config)};
}

MetricResult g_ssim(const Image& x, const Image& y, const SsimConstants& c, const WindowSpec& window) {
    validate(c);
    check_pair(x, y, "g-ssim");
    if (x.width() < 3 || x.height() < 3) throw InvalidArgument("g-ssim: image must be at least 3x3");
    require_window_fits(x, window, "g-ssim");
    const Plane px(x), py(y);
    const Plane gx = sobel_magnitude(px);
    const Plane gy = sobel_magnitude(py);
    const MeanMaps m = mean_maps(px, py, gx, gy, c, window);
    auto config = window_config(c, window);
    config["gradient"] = "sobel";
    return {"g-ssim", clamp_unit(m.ssim), std::move(config)};
}

namespace {

double itw_score(const Image& x, const Image& y, const std::vector<double>& fx, const std::vector<double>& fy,
                 const SsimConstants& c) {
    const std::size_t n = x.size();
    const auto nd = static_cast<double>(n);
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(fx[i] * x[i]);
        sy.add(fy[i] * y[i]);
    }
    const double mx = sx.value();
    const double my = sy.value();
    CompensatedSum vx, vy, cxy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = fx[i] * nd * x[i] - mx;
        const double dy = fy[i] * nd * y[i] - my;
        vx.add(dx * dx);
        vy.add(dy * dy);
        cxy.add(dx * dy);
    }
    const double dof = nd - 1.0;
    return clamp_unit(luminance(mx, my, c.c1) *
                      contrast_structure(vx.value() / dof, vy.value() / dof, cxy.value() / dof, c.c2));
}

}  // namespace

MetricResult itw_ssim(const Image& x, const Image& y, const WeightingSpec& spec, const SsimConstants& c) {
    validate(c);
    spec.validate();
    check_pair(x, y, "itw-ssim");
    const WeightingFactors fx = weighting_factors(x, spec);
    const WeightingFactors fy = weighting_factors(y, spec);
    auto config = ssim_config(c);
    config["weighting"] = to_string(spec.kind);
    switch (spec.kind) {
        case WeightingKind::gaussian: config["sigma"] = spec.sigma; break;
        case WeightingKind::tanh: config["slope"] = spec.slope; break;
        case WeightingKind::sigmoid:
            config["slope"] = spec.slope;
            config["center"] = spec.center;
            break;
    }
    if (fx.uniform_fallback || fy.uniform_fallback) config["uniform_fallback"] = true;
    return {"itw:" + std::string(to_string(spec.kind)), itw_score(x, y, fx.factors, fy.factors, c), std::move(config)};
}

double itw_ssim_with(const Image& x, const Image& y, const std::function<double(double)>& g, const SsimConstants& c) {
    validate(c);
    check_pair(x, y, "itw-ssim");
    auto factors = [&](const Image& img) {
        std::vector<double> f(img.size());
        CompensatedSum total;
        for (std::size_t i = 0; i < img.size(); ++i) {
            f[i] = g(img[i]);
            if (!(f[i] > 0.0)) throw InvalidArgument("weighting function must be positive");
            total.add(f[i]);
        }
        const double s = total.value();
        for (double& v : f) v /= s;
        return f;
    };
    return itw_score(x, y, factors(x), factors(y), c);
}

MetricResult lisi(const Image& x, const Image& y, const LisiConstants& c) {
    if (!(c.c1 > 0.0) || !(c.c2 > 0.0)) throw InvalidArgument("LISI constants must be positive");
    check_pair(x, y, "lisi");
    CompensatedSum agreement, sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        agreement.add(std::abs(x[i] + y[i]) / (std::abs(x[i] - y[i]) + c.c1));
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double score = c.d() * agreement.value() / (std::max(sx.value(), sy.value()) + c.c2);
    return {"lisi", score, {{"c1", c.c1}, {"c2", c.c2}, {"d", c.d()}}};
}

}  // namespace intensim
