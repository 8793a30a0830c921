// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seedobj/error.hpp"

/// \file grid.hpp
/// Dimension-agnostic image container and grid-graph neighborhoods.
///
/// Axis order is always slowest-first: (row, col) for images and
/// (slice, row, col) for volumes. Pixel values are stored row-major with the
/// channels of one pixel adjacent ("interleaved"), i.e. the value of channel
/// `ch` at linear pixel index `i` lives at `values()[i * channels() + ch]`.

namespace seedobj {

inline constexpr std::size_t max_rank = 3;

/// Pixel/voxel position, slowest axis first.
struct Coord {
    std::array<std::size_t, max_rank> index{};
    std::size_t rank = 0;

    Coord() = default;
    Coord(std::initializer_list<std::size_t> idx) : rank(idx.size()) {
        if (rank > max_rank) throw ValidationError("coordinate rank exceeds 3");
        std::copy(idx.begin(), idx.end(), index.begin());
    }

    std::size_t operator[](std::size_t axis) const { return index[axis]; }
    std::size_t& operator[](std::size_t axis) { return index[axis]; }

    friend bool operator==(const Coord&, const Coord&) = default;
};

inline std::string to_string(const Coord& c) {
    std::string out = "(";
    for (std::size_t a = 0; a < c.rank; ++a) {
        if (a) out += ',';
        out += std::to_string(c[a]);
    }
    return out + ")";
}

/// Extents of a 2D or 3D grid.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<std::size_t> extents)
        : Shape(std::span<const std::size_t>(extents.begin(), extents.size())) {}
    explicit Shape(std::span<const std::size_t> extents) : rank_(extents.size()) {
        if (rank_ != 2 && rank_ != 3)
            throw ValidationError("grid rank must be 2 or 3, got " + std::to_string(rank_));
        for (std::size_t a = 0; a < rank_; ++a) {
            if (extents[a] == 0) throw ValidationError("grid extents must be positive");
            extents_[a] = extents[a];
        }
    }

    std::size_t rank() const { return rank_; }
    std::size_t operator[](std::size_t axis) const { return extents_[axis]; }

    std::size_t count() const {
        if (rank_ == 0) return 0;
        std::size_t n = 1;
        for (std::size_t a = 0; a < rank_; ++a) n *= extents_[a];
        return n;
    }

    bool contains(const Coord& c) const {
        if (c.rank != rank_) return false;
        for (std::size_t a = 0; a < rank_; ++a)
            if (c[a] >= extents_[a]) return false;
        return true;
    }

    std::size_t linear(const Coord& c) const {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < rank_; ++a) idx = idx * extents_[a] + c[a];
        return idx;
    }

    Coord coord(std::size_t linear_index) const {
        Coord c;
        c.rank = rank_;
        for (std::size_t a = rank_; a-- > 0;) {
            c[a] = linear_index % extents_[a];
            linear_index /= extents_[a];
        }
        return c;
    }

    std::vector<std::size_t> extents() const {
        return {extents_.begin(), extents_.begin() + static_cast<std::ptrdiff_t>(rank_)};
    }

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::array<std::size_t, max_rank> extents_{};
    std::size_t rank_ = 0;
};

inline std::string to_string(const Shape& s) {
    std::string out = "[";
    for (std::size_t a = 0; a < s.rank(); ++a) {
        if (a) out += 'x';
        out += std::to_string(s[a]);
    }
    return out + "]";
}

/// faces: 4 neighbors in 2D, 6 in 3D. full: 8 in 2D, 26 in 3D.
enum class Connectivity { faces, full };

/// Precomputed neighbor offsets for one grid shape.
///
/// Offsets are enumerated in lexicographic order of the per-axis offset
/// vector, so iteration order is fixed. For 2D faces this is
/// (-1,0), (0,-1), (0,1), (1,0).
class Neighborhood {
public:
    Neighborhood(const Shape& shape, Connectivity conn) : shape_(shape) {
        const std::size_t rank = shape.rank();
        std::array<std::ptrdiff_t, max_rank> stride{};
        std::ptrdiff_t s = 1;
        for (std::size_t a = rank; a-- > 0;) {
            stride[a] = s;
            s *= static_cast<std::ptrdiff_t>(shape[a]);
        }
        std::size_t total = 1;
        for (std::size_t a = 0; a < rank; ++a) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::array<int, max_rank> off{};
            std::size_t rest = code;
            int nonzero = 0;
            for (std::size_t a = rank; a-- > 0;) {
                off[a] = static_cast<int>(rest % 3) - 1;
                rest /= 3;
                nonzero += off[a] != 0;
            }
            if (nonzero == 0) continue;
            if (conn == Connectivity::faces && nonzero != 1) continue;
            std::ptrdiff_t delta = 0;
            for (std::size_t a = 0; a < rank; ++a) delta += off[a] * stride[a];
            offsets_.push_back(off);
            deltas_.push_back(delta);
        }
    }

    const Shape& shape() const { return shape_; }
    std::size_t max_neighbors() const { return offsets_.size(); }

    /// Calls `visit(neighbor_linear_index)` for every in-bounds neighbor.
    template <class Visit>
    void for_each(std::size_t index, Visit&& visit) const {
        const Coord c = shape_.coord(index);
        bool interior = true;
        for (std::size_t a = 0; a < shape_.rank(); ++a)
            interior = interior && c[a] > 0 && c[a] + 1 < shape_[a];
        if (interior) {
            for (std::ptrdiff_t d : deltas_)
                visit(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(index) + d));
            return;
        }
        for (std::size_t k = 0; k < offsets_.size(); ++k) {
            bool inside = true;
            for (std::size_t a = 0; a < shape_.rank() && inside; ++a) {
                const int o = offsets_[k][a];
                inside = !(o < 0 && c[a] == 0) && !(o > 0 && c[a] + 1 == shape_[a]);
            }
            if (inside)
                visit(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(index) + deltas_[k]));
        }
    }

private:
    Shape shape_;
    std::vector<std::array<int, max_rank>> offsets_;
    std::vector<std::ptrdiff_t> deltas_;
};

/// Immutable multi-channel intensity field over a 2D or 3D grid.
class Grid {
public:
    Grid() = default;

    Grid(Shape shape, std::size_t channels, std::vector<double> values)
        : shape_(shape), channels_(channels), values_(std::move(values)) {
        if (shape_.rank() == 0) throw ValidationError("grid shape is empty");
        if (channels_ == 0) throw ValidationError("grid must have at least one channel");
        if (values_.size() != shape_.count() * channels_)
            throw ValidationError("grid data length " + std::to_string(values_.size()) +
                                  " does not match shape " + to_string(shape_) + " x " +
                                  std::to_string(channels_) + " channels");
        for (double v : values_)
            if (!std::isfinite(v)) throw ValidationError("grid contains a non-finite value");
    }

    static Grid filled(Shape shape, std::size_t channels, double value) {
        return Grid(shape, channels, std::vector<double>(shape.count() * channels, value));
    }

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.rank(); }
    std::size_t channels() const { return channels_; }
    std::size_t pixel_count() const { return shape_.count(); }
    bool empty() const { return values_.empty(); }

    std::span<const double> values() const { return values_; }
    std::span<const double> pixel(std::size_t index) const {
        return std::span<const double>(values_).subspan(index * channels_, channels_);
    }
    double at(std::size_t index, std::size_t channel = 0) const {
        return values_[index * channels_ + channel];
    }
    double at(const Coord& c, std::size_t channel = 0) const {
        return at(shape_.linear(c), channel);
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Shape shape_;
    std::size_t channels_ = 0;
    std::vector<double> values_;
};

/// In-bounds neighbors of `c`, in the fixed lexicographic offset order.
inline std::vector<Coord> neighbors(const Coord& c, const Shape& shape, Connectivity conn) {
    std::vector<Coord> out;
    Neighborhood(shape, conn).for_each(shape.linear(c), [&](std::size_t q) {
        out.push_back(shape.coord(q));
    });
    return out;
}

inline std::vector<Coord> neighbors(const Coord& c, const Grid& g, Connectivity conn) {
    return neighbors(c, g.shape(), conn);
}

/// Global min-max rescale to [0,1], jointly over all channels.
/// A constant grid maps to all zeros.
inline Grid normalize_intensity(const Grid& g) {
    const auto vals = g.values();
    std::vector<double> out(vals.size(), 0.0);
    if (!vals.empty()) {
        const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        const double min = *lo;
        const double range = *hi - *lo;
        if (range > 0.0) {
            for (std::size_t k = 0; k < vals.size(); ++k)
                out[k] = std::clamp((vals[k] - min) / range, 0.0, 1.0);
        }
    }
    return Grid(g.shape(), g.channels(), std::move(out));
}

} // namespace seedobj
