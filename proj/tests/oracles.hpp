// Brute-force reference implementations used to check the library. These
// stay deliberately naive and independent of the production code paths:
// direct definitions, no shared helpers, no attention to complexity.
#pragma once

#include <neuroseg/instance.hpp>
#include <neuroseg/labelsynth.hpp>
#include <neuroseg/metrics.hpp>
#include <neuroseg/raster.hpp>
#include <neuroseg/tiling.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracles {

using namespace neuroseg;

// ---------------------------------------------------------------------------
// Textbook RGB -> HSV, exact rational arithmetic in sixths of the hue circle.
inline void rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t& h,
                       std::uint8_t& s, std::uint8_t& v) {
    auto round_half_up = [](long long num, long long den) { return (2 * num + den) / (2 * den); };

    const int maxc = std::max(r, std::max(g, b));
    const int minc = std::min(r, std::min(g, b));
    const int chroma = maxc - minc;

    v = static_cast<std::uint8_t>(maxc);
    s = maxc == 0 ? 0 : static_cast<std::uint8_t>(round_half_up(255LL * chroma, maxc));
    if (chroma == 0) {
        h = 0;
        return;
    }
    // Hue as the exact fraction sixths / (6*chroma) of a full turn.
    long long sixths;
    if (maxc == r)
        sixths = static_cast<long long>(g) - b;
    else if (maxc == g)
        sixths = static_cast<long long>(b) - r + 2LL * chroma;
    else
        sixths = static_cast<long long>(r) - g + 4LL * chroma;
    if (sixths < 0) sixths += 6LL * chroma;
    h = static_cast<std::uint8_t>(round_half_up(255LL * sixths, 6LL * chroma));
}

// ---------------------------------------------------------------------------
// Connected components by BFS flood fill, components numbered in scan order.
inline InstanceLabelMap flood_fill_components(const SemanticMask& mask, Connectivity conn) {
    const int w = mask.width, h = mask.height;
    InstanceLabelMap out(w, h);
    const int n_dirs = conn == Connectivity::Eight ? 8 : 4;
    const int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    std::uint32_t next = 1;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!mask.at(sx, sy) || out.at(sx, sy) != 0) continue;
            const std::uint32_t label = next++;
            std::deque<std::pair<int, int>> todo{{sx, sy}};
            out.at(sx, sy) = label;
            while (!todo.empty()) {
                const auto [x, y] = todo.front();
                todo.pop_front();
                for (int d = 0; d < n_dirs; ++d) {
                    const int nx = x + dx[d], ny = y + dy[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (!mask.at(nx, ny) || out.at(nx, ny) != 0) continue;
                    out.at(nx, ny) = label;
                    todo.emplace_back(nx, ny);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Naive disk morphology: per-pixel max/min filter, outside = background.
inline SemanticMask naive_dilate(const SemanticMask& mask, int radius) {
    const int w = mask.width, h = mask.height;
    SemanticMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool any = false;
            for (int dy = -radius; dy <= radius && !any; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx * dx + dy * dy > radius * radius) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue; // outside is bg
                    if (mask.at(nx, ny)) {
                        any = true;
                        break;
                    }
                }
            out.set(x, y, any);
        }
    return out;
}

inline SemanticMask naive_erode(const SemanticMask& mask, int radius) {
    const int w = mask.width, h = mask.height;
    SemanticMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool all = true;
            for (int dy = -radius; dy <= radius && all; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx * dx + dy * dy > radius * radius) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.at(nx, ny)) {
                        all = false; // outside counts as background
                        break;
                    }
                }
            out.set(x, y, all);
        }
    return out;
}

// ---------------------------------------------------------------------------
// All-pairs squared EDT to the nearest background pixel; the virtual
// background outside the image enters as the axis-aligned border distance.
inline std::vector<std::int64_t> allpairs_sqedt(const SemanticMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<std::int64_t> out(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (int by = 0; by < h; ++by)
                for (int bx = 0; bx < w; ++bx)
                    if (!mask.at(bx, by)) {
                        const std::int64_t dx = x - bx, dy = y - by;
                        best = std::min(best, dx * dx + dy * dy);
                    }
            const std::int64_t border = std::min(std::min(x + 1, y + 1), std::min(w - x, h - y));
            best = std::min(best, border * border);
            out[static_cast<std::size_t>(y) * w + x] = best;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Naive border-replicated sliding mean of (R+G+B)/3, one exact rounding.
inline std::uint8_t naive_local_mean(const RasterImage& image, int x, int y, int radius) {
    long long sum = 0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            const int sx = std::clamp(x + dx, 0, image.width - 1);
            const int sy = std::clamp(y + dy, 0, image.height - 1);
            sum += image.at(sx, sy, 0) + image.at(sx, sy, 1) + image.at(sx, sy, 2);
        }
    const long long den = 3LL * (2 * radius + 1) * (2 * radius + 1);
    return static_cast<std::uint8_t>((2 * sum + den) / (2 * den));
}

// ---------------------------------------------------------------------------
// Multi-source BFS partition: per pixel the hop distance to the nearest
// clipped seed pixel and the smallest seed id achieving it.
inline InstanceLabelMap multisource_bfs(const InstanceLabelMap& seeds, const SemanticMask& fg,
                                        Connectivity conn) {
    const int w = seeds.width, h = seeds.height;
    const int n_dirs = conn == Connectivity::Eight ? 8 : 4;
    const int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    constexpr int kInf = std::numeric_limits<int>::max();

    std::vector<int> dist(static_cast<std::size_t>(w) * h, kInf);
    std::deque<std::pair<int, int>> frontier;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (seeds.at(x, y) != 0 && fg.at(x, y)) {
                dist[static_cast<std::size_t>(y) * w + x] = 0;
                frontier.emplace_back(x, y);
            }
    while (!frontier.empty()) {
        const auto [x, y] = frontier.front();
        frontier.pop_front();
        const int d = dist[static_cast<std::size_t>(y) * w + x];
        for (int k = 0; k < n_dirs; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            auto& nd = dist[static_cast<std::size_t>(ny) * w + nx];
            if (!fg.at(nx, ny) || nd != kInf) continue;
            nd = d + 1;
            frontier.emplace_back(nx, ny);
        }
    }

    InstanceLabelMap out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (seeds.at(x, y) != 0 && fg.at(x, y)) out.at(x, y) = seeds.at(x, y);

    // Winners layer by layer: the smallest id among optimal predecessors.
    int max_d = 0;
    for (const int d : dist)
        if (d != kInf) max_d = std::max(max_d, d);
    for (int layer = 1; layer <= max_d; ++layer) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (dist[static_cast<std::size_t>(y) * w + x] != layer) continue;
                std::uint32_t best = 0;
                for (int k = 0; k < n_dirs; ++k) {
                    const int nx = x + dx[k], ny = y + dy[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (dist[static_cast<std::size_t>(ny) * w + nx] != layer - 1) continue;
                    const std::uint32_t cand = out.at(nx, ny);
                    if (cand != 0 && (best == 0 || cand < best)) best = cand;
                }
                out.at(x, y) = best;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Contour band check: a pixel is contour iff some interface pixel (labeled,
// touching a different nonzero label in 8-neighborhood) lies within
// Euclidean distance `radius`.
inline bool near_interface(const InstanceLabelMap& inst, int x, int y, int radius) {
    const int w = inst.width, h = inst.height;
    const int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int iy = std::max(0, y - radius); iy <= std::min(h - 1, y + radius); ++iy)
        for (int ix = std::max(0, x - radius); ix <= std::min(w - 1, x + radius); ++ix) {
            if ((ix - x) * (ix - x) + (iy - y) * (iy - y) > radius * radius) continue;
            const std::uint32_t id = inst.at(ix, iy);
            if (id == 0) continue;
            for (int d = 0; d < 8; ++d) {
                const int nx = ix + dx8[d], ny = iy + dy8[d];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const std::uint32_t nid = inst.at(nx, ny);
                if (nid != 0 && nid != id) return true;
            }
        }
    return false;
}

// ---------------------------------------------------------------------------
// Per-pixel weighted stitching, looping over every patch for every pixel.
inline ProbabilityMap naive_assemble(
    const std::vector<std::pair<TileOrigin, ProbabilityMap>>& patches, int width, int height,
    const WeightMap& wmap) {
    ProbabilityMap out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double vsum = 0.0, wsum = 0.0;
            for (const auto& [o, patch] : patches) {
                const int px = x - o.x, py = y - o.y;
                if (px < 0 || py < 0 || px >= patch.width || py >= patch.height) continue;
                const double wt = wmap.at(px, py);
                vsum += wt * patch.at(px, py);
                wsum += wt;
            }
            out.at(x, y) = wsum > 0.0 ? vsum / wsum : 0.0;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Detection counting straight from the rule text.
inline EvalCounts naive_match_detections(const InstanceLabelMap& pred,
                                         const PointAnnotationSet& centroids) {
    EvalCounts counts;
    std::set<std::uint32_t> tp_ids;
    for (const std::uint32_t id : pred.ids()) {
        int contained = 0;
        for (const auto& c : centroids.points)
            if (pred.at(c.x, c.y) == id) ++contained;
        if (contained == 1) {
            ++counts.tp;
            tp_ids.insert(id);
        } else {
            ++counts.fp;
        }
    }
    for (const auto& c : centroids.points) {
        const std::uint32_t id = pred.at(c.x, c.y);
        if (id == 0 || !tp_ids.count(id)) ++counts.fn;
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Exhaustive all-pairs IoU matching; O(pred * gt * pixels).
inline EvalCounts naive_match_instances(const InstanceLabelMap& pred, const InstanceLabelMap& gt,
                                        double thresh) {
    const auto pred_ids = pred.ids();
    const auto gt_ids = gt.ids();
    std::set<std::uint32_t> matched_pred, matched_gt;
    for (const std::uint32_t p : pred_ids)
        for (const std::uint32_t g : gt_ids) {
            std::size_t inter = 0, uni = 0;
            for (std::size_t i = 0; i < pred.labels.size(); ++i) {
                const bool in_p = pred.labels[i] == p, in_g = gt.labels[i] == g;
                inter += in_p && in_g;
                uni += in_p || in_g;
            }
            if (uni == 0) continue;
            if (static_cast<double>(inter) / static_cast<double>(uni) > thresh) {
                matched_pred.insert(p);
                matched_gt.insert(g);
            }
        }
    EvalCounts counts;
    counts.tp = matched_pred.size();
    counts.fp = pred_ids.size() - matched_pred.size();
    counts.fn = gt_ids.size() - matched_gt.size();
    return counts;
}

inline double naive_dice(const SemanticMask& a, const SemanticMask& b) {
    std::size_t na = 0, nb = 0, inter = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        na += a.bits[i] != 0;
        nb += b.bits[i] != 0;
        inter += a.bits[i] != 0 && b.bits[i] != 0;
    }
    return (na + nb) == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

// ---------------------------------------------------------------------------
// Lattice points inside a disk of radius r around (0,0).
inline std::size_t disk_lattice_count(int radius) {
    std::size_t count = 0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) ++count;
    return count;
}

// Boundary pixels of one instance: 4-neighbor (or outside) not same label.
inline std::size_t boundary_pixel_count(const InstanceLabelMap& inst, std::uint32_t id) {
    const int w = inst.width, h = inst.height;
    std::size_t count = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (inst.at(x, y) != id) continue;
            const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1 ||
                              inst.at(x - 1, y) != id || inst.at(x + 1, y) != id ||
                              inst.at(x, y - 1) != id || inst.at(x, y + 1) != id;
            if (edge) ++count;
        }
    return count;
}

} // namespace oracles
