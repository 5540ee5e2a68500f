#include <neuroseg/raster_ops.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace neuroseg {

namespace {

// round(num/den) for num >= 0, den > 0, exact integer arithmetic (half up).
inline std::int64_t round_div(std::int64_t num, std::int64_t den) {
    return (2 * num + den) / (2 * den);
}

} // namespace

std::vector<std::uint32_t> InstanceLabelMap::ids() const {
    std::vector<std::uint32_t> out(labels.begin(), labels.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (!out.empty() && out.front() == 0) out.erase(out.begin());
    return out;
}

void rgb_pixel_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                      std::uint8_t& h, std::uint8_t& s, std::uint8_t& v) {
    const int maxc = std::max({r, g, b});
    const int minc = std::min({r, g, b});
    const int delta = maxc - minc;

    v = static_cast<std::uint8_t>(maxc);
    s = (maxc == 0) ? 0 : static_cast<std::uint8_t>(round_div(255LL * delta, maxc));

    if (delta == 0) {
        h = 0;
        return;
    }
    // Hue in degrees as the exact rational num60 / delta, num60 in [0, 360*delta).
    std::int64_t num60;
    if (maxc == r) {
        num60 = 60LL * (g - b);
        if (num60 < 0) num60 += 360LL * delta;
    } else if (maxc == g) {
        num60 = 60LL * (b - r) + 120LL * delta;
    } else {
        num60 = 60LL * (r - g) + 240LL * delta;
    }
    // H8 = round(255 * hue_deg / 360)
    h = static_cast<std::uint8_t>(round_div(255LL * num60, 360LL * delta));
}

RasterImage rgb_to_hsv(const RasterImage& image) {
    if (image.channels != 3)
        throw DimensionError("rgb_to_hsv: expected 3-channel image, got " +
                             std::to_string(image.channels));
    RasterImage out(image.width, image.height, 3);
    const std::size_t n = image.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t h, s, v;
        rgb_pixel_to_hsv(image.samples[3 * i], image.samples[3 * i + 1],
                         image.samples[3 * i + 2], h, s, v);
        out.samples[3 * i] = h;
        out.samples[3 * i + 1] = s;
        out.samples[3 * i + 2] = v;
    }
    return out;
}

RasterImage rgb_to_gray(const RasterImage& image) {
    if (image.channels == 1) return image;
    RasterImage out(image.width, image.height, 1);
    const std::size_t n = image.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t sum = image.samples[3 * i] + image.samples[3 * i + 1] +
                                 image.samples[3 * i + 2];
        out.samples[i] = static_cast<std::uint8_t>(round_div(sum, 3));
    }
    return out;
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;

    std::uint32_t make() {
        parent.push_back(static_cast<std::uint32_t>(parent.size()));
        return parent.back();
    }
    std::uint32_t find(std::uint32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

InstanceLabelMap connected_components(const SemanticMask& mask, Connectivity conn) {
    const int w = mask.width, h = mask.height;
    InstanceLabelMap out(w, h);
    if (w == 0 || h == 0) return out;

    // Provisional labels, 1-based; 0 stays background.
    std::vector<std::uint32_t> prov(mask.pixel_count(), 0);
    UnionFind uf;
    uf.make(); // slot 0 reserved for background

    const bool diag = conn == Connectivity::Eight;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            const std::size_t i = mask.index(x, y);
            std::uint32_t best = 0;
            auto consider = [&](int nx, int ny) {
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
                const std::uint32_t p = prov[mask.index(nx, ny)];
                if (p == 0) return;
                if (best == 0)
                    best = p;
                else
                    uf.unite(best, p);
            };
            consider(x - 1, y);
            consider(x, y - 1);
            if (diag) {
                consider(x - 1, y - 1);
                consider(x + 1, y - 1);
            }
            prov[i] = best != 0 ? best : uf.make();
        }
    }

    // Resolve and renumber components by first pixel in scan order.
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    std::uint32_t next = 1;
    for (std::size_t i = 0; i < prov.size(); ++i) {
        if (prov[i] == 0) continue;
        const std::uint32_t root = uf.find(prov[i]);
        auto [it, inserted] = remap.try_emplace(root, next);
        if (inserted) ++next;
        out.labels[i] = it->second;
    }
    return out;
}

std::size_t component_count(const InstanceLabelMap& map) { return map.ids().size(); }

namespace {

constexpr double kEdtInf = 1e15;

// Felzenszwalb & Huttenlocher 1-D squared distance transform.
void edt_1d(const std::vector<double>& f, int n, std::vector<double>& d,
            std::vector<int>& v, std::vector<double>& z) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            const int p = v[k];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const int p = v[k];
        d[q] = static_cast<double>(q - p) * (q - p) + f[p];
    }
}

// Exact squared EDT to the nearest site pixel. If border_is_site, every
// lattice point outside the image also counts as a site.
std::vector<double> edt_sq(const std::vector<std::uint8_t>& site, int w, int h,
                           bool border_is_site) {
    std::vector<double> g(static_cast<std::size_t>(w) * h);
    const int nmax = std::max(w, h);
    std::vector<double> f(nmax), d(nmax), z(nmax + 1);
    std::vector<int> v(nmax);

    // Column pass.
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y)
            f[y] = site[static_cast<std::size_t>(y) * w + x] ? 0.0 : kEdtInf;
        edt_1d(f, h, d, v, z);
        for (int y = 0; y < h; ++y) {
            double val = d[y];
            if (border_is_site) {
                const double up = static_cast<double>(y + 1) * (y + 1);
                const double dn = static_cast<double>(h - y) * (h - y);
                val = std::min({val, up, dn});
            }
            g[static_cast<std::size_t>(y) * w + x] = val;
        }
    }

    // Row pass.
    std::vector<double> out(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = g[static_cast<std::size_t>(y) * w + x];
        edt_1d(f, w, d, v, z);
        for (int x = 0; x < w; ++x) {
            double val = d[x];
            if (border_is_site) {
                const double lf = static_cast<double>(x + 1) * (x + 1);
                const double rt = static_cast<double>(w - x) * (w - x);
                val = std::min({val, lf, rt});
            }
            out[static_cast<std::size_t>(y) * w + x] = val;
        }
    }
    return out;
}

} // namespace

SemanticMask dilate(const SemanticMask& mask, int radius) {
    if (radius < 0) throw InputError("dilate: negative radius");
    if (radius == 0) return mask;
    const auto sq = edt_sq(mask.bits, mask.width, mask.height, /*border_is_site=*/false);
    const double r2 = static_cast<double>(radius) * radius;
    SemanticMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < sq.size(); ++i) out.bits[i] = sq[i] <= r2;
    return out;
}

SemanticMask erode(const SemanticMask& mask, int radius) {
    if (radius < 0) throw InputError("erode: negative radius");
    if (radius == 0) return mask;
    std::vector<std::uint8_t> bg(mask.bits.size());
    for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = mask.bits[i] ? 0 : 1;
    const auto sq = edt_sq(bg, mask.width, mask.height, /*border_is_site=*/true);
    const double r2 = static_cast<double>(radius) * radius;
    SemanticMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < sq.size(); ++i) out.bits[i] = mask.bits[i] && sq[i] > r2;
    return out;
}

std::vector<std::int64_t> squared_distance_transform(const SemanticMask& mask) {
    std::vector<std::uint8_t> bg(mask.bits.size());
    for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = mask.bits[i] ? 0 : 1;
    const auto sq = edt_sq(bg, mask.width, mask.height, /*border_is_site=*/true);
    std::vector<std::int64_t> out(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) out[i] = std::llround(sq[i]);
    return out;
}

ProbabilityMap distance_transform(const SemanticMask& mask) {
    const auto sq = squared_distance_transform(mask);
    ProbabilityMap out(mask.width, mask.height);
    for (std::size_t i = 0; i < sq.size(); ++i)
        out.values[i] = std::sqrt(static_cast<double>(sq[i]));
    return out;
}

} // namespace neuroseg
