#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace radgpr {

/// A point in the input space. Dimension is fixed per run, not per type.
using Point = std::vector<double>;

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("squared_distance: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

/// Axis-aligned box, the compact input domain.
struct Box {
    Point lo;
    Point hi;

    std::size_t dim() const { return lo.size(); }

    bool contains(std::span<const double> z) const {
        if (z.size() != lo.size()) return false;
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (z[k] < lo[k] || z[k] > hi[k]) return false;
        }
        return true;
    }

    void clamp(Point& z) const {
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (z[k] < lo[k]) z[k] = lo[k];
            if (z[k] > hi[k]) z[k] = hi[k];
        }
    }

    /// Fold a coordinate back into [lo, hi] by mirroring at the walls.
    void reflect(Point& z) const {
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double w = hi[k] - lo[k];
            if (w <= 0.0) {
                z[k] = lo[k];
                continue;
            }
            double x = z[k] - lo[k];
            x = std::fmod(x, 2.0 * w);
            if (x < 0.0) x += 2.0 * w;
            if (x > w) x = 2.0 * w - x;
            z[k] = lo[k] + x;
        }
    }
};

/// Uniformly separated rectangular grid over a box, inclusive of the
/// endpoints. Points are stored row-major in axis order; a strided
/// sub-grid selects every `stride`-th index per axis.
class Grid {
public:
    Grid() = default;

    Grid(const Box& box, int points_per_axis) : box_(box), per_axis_(points_per_axis) {
        if (points_per_axis < 1) throw std::invalid_argument("Grid: points_per_axis < 1");
        const std::size_t dim = box.dim();
        std::size_t total = 1;
        for (std::size_t k = 0; k < dim; ++k) total *= static_cast<std::size_t>(points_per_axis);
        points_.reserve(total);
        Point p(dim, 0.0);
        std::vector<int> idx(dim, 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            for (std::size_t k = dim; k-- > 0;) {
                idx[k] = static_cast<int>(rem % per_axis_);
                rem /= per_axis_;
            }
            for (std::size_t k = 0; k < dim; ++k) p[k] = coordinate(idx[k], k);
            points_.push_back(p);
        }
    }

    double coordinate(int i, std::size_t axis) const {
        if (per_axis_ == 1) return box_.lo[axis];
        const double h = (box_.hi[axis] - box_.lo[axis]) / static_cast<double>(per_axis_ - 1);
        return box_.lo[axis] + h * static_cast<double>(i);
    }

    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    int points_per_axis() const { return per_axis_; }
    std::size_t dim() const { return box_.dim(); }
    const Box& box() const { return box_; }

    /// Flat indices of the sub-grid taking every stride-th point per axis.
    std::vector<std::size_t> strided_subset(int stride) const {
        if (stride < 1) throw std::invalid_argument("Grid: stride < 1");
        const std::size_t dim = box_.dim();
        std::vector<std::size_t> out;
        std::vector<int> idx(dim, 0);
        for (std::size_t flat = 0; flat < points_.size(); ++flat) {
            std::size_t rem = flat;
            bool keep = true;
            for (std::size_t k = dim; k-- > 0;) {
                const int v = static_cast<int>(rem % per_axis_);
                rem /= per_axis_;
                if (v % stride != 0) {
                    keep = false;
                    break;
                }
            }
            if (keep) out.push_back(flat);
        }
        return out;
    }

private:
    Box box_{};
    int per_axis_ = 0;
    std::vector<Point> points_;
};

}  // namespace radgpr
