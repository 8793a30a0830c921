// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "seedobj/seedobj.hpp"

namespace seedobj::fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "seedobj") {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random grid with values drawn on a dyadic lattice (multiples of 1/1024),
/// so adding dyadic offsets is exact in floating point.
inline Grid random_grid(std::mt19937_64& rng, const Shape& shape, std::size_t channels,
                        bool dyadic = false) {
    std::vector<double> v(shape.count() * channels);
    for (double& x : v)
        x = dyadic ? static_cast<double>(pick(rng, 0, 1024)) / 1024.0 : uniform(rng);
    return Grid(shape, channels, std::move(v));
}

inline SeedSet random_seeds(std::mt19937_64& rng, const Shape& shape, std::size_t count,
                            int num_classes) {
    SeedSet s;
    s.num_classes = num_classes;
    std::vector<std::size_t> cells(shape.count());
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
    std::shuffle(cells.begin(), cells.end(), rng);
    count = std::min(count, cells.size());
    for (std::size_t k = 0; k < count; ++k)
        s.seeds.push_back({shape.coord(cells[k]),
                           static_cast<int>(pick(rng, 1, static_cast<std::size_t>(num_classes - 1))),
                           static_cast<std::uint32_t>(k)});
    return s;
}

inline Shape random_shape_2d(std::mt19937_64& rng, std::size_t max_extent = 16) {
    return Shape{pick(rng, 1, max_extent), pick(rng, 1, max_extent)};
}

inline Shape random_shape_3d(std::mt19937_64& rng, std::size_t max_extent = 8) {
    return Shape{pick(rng, 1, max_extent), pick(rng, 1, max_extent), pick(rng, 1, max_extent)};
}

/// Places `g` at `offset` inside a larger canvas filled with `pad`.
inline Grid embed(const Grid& g, const Shape& canvas, const Coord& offset, double pad) {
    std::vector<double> v(canvas.count() * g.channels(), pad);
    for (std::size_t i = 0; i < g.pixel_count(); ++i) {
        Coord c = g.shape().coord(i);
        for (std::size_t a = 0; a < c.rank; ++a) c[a] += offset[a];
        const std::size_t j = canvas.linear(c);
        for (std::size_t ch = 0; ch < g.channels(); ++ch)
            v[j * g.channels() + ch] = g.at(i, ch);
    }
    return Grid(canvas, g.channels(), std::move(v));
}

} // namespace seedobj::fixture
