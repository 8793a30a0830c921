// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedobj/error.hpp"
#include "seedobj/eval.hpp"
#include "seedobj/grid.hpp"
#include "seedobj/objectness.hpp"
#include "seedobj/tensor_io_codecs.hpp"

/// \file tensor_io.hpp
/// File formats.
///
/// TensorFile layout (all integers little-endian):
///
///     offset 0   8 bytes   magic "SEEDPRI1"
///     offset 8   4 bytes   header length H (uint32)
///     offset 12  H bytes   JSON {"shape":[...],"channels":n,"dtype":"f32"|"u8"|"u16","order":"row-major"}
///     offset 12+H          payload, product(shape) * channels values, channels innermost
///
/// Seed CSV: header `x,y,class` (images) or `x,y,z,class` (volumes), then one
/// 0-based integer row per seed. x is the column, y the row, z the slice.
/// The instance id of a seed is its row order.

namespace seedobj::io {

inline constexpr std::string_view tensor_magic = "SEEDPRI1";
inline constexpr std::uint32_t max_header_bytes = 1u << 20;

enum class Dtype { f32, u8, u16 };

inline std::string_view dtype_name(Dtype d) {
    switch (d) {
    case Dtype::f32: return "f32";
    case Dtype::u8: return "u8";
    case Dtype::u16: return "u16";
    }
    return "?";
}

inline std::size_t dtype_size(Dtype d) { return d == Dtype::u8 ? 1 : d == Dtype::u16 ? 2 : 4; }

/// Decoded TensorFile. Values are widened to double; f32 payloads convert
/// exactly.
struct Tensor {
    std::vector<std::size_t> shape;
    std::size_t channels = 1;
    Dtype dtype = Dtype::f32;
    std::vector<double> values;

    std::size_t element_count() const {
        std::size_t n = channels;
        for (std::size_t e : shape) n *= e;
        return n;
    }
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return std::move(buf).str();
}

} // namespace detail

/// Serializes a tensor. Integer dtypes require integral values in range.
inline std::string encode_tensor(const Tensor& t) {
    if (t.shape.empty()) throw ValidationError("tensor shape is empty");
    if (t.channels == 0) throw ValidationError("tensor must have at least one channel");
    if (t.values.size() != t.element_count())
        throw ValidationError("tensor has " + std::to_string(t.values.size()) +
                              " values, shape requires " + std::to_string(t.element_count()));

    nlohmann::ordered_json header;
    header["shape"] = t.shape;
    header["channels"] = t.channels;
    header["dtype"] = dtype_name(t.dtype);
    header["order"] = "row-major";
    const std::string text = header.dump();

    std::string out(tensor_magic);
    detail::put_u32(out, static_cast<std::uint32_t>(text.size()));
    out += text;
    out.reserve(out.size() + t.values.size() * dtype_size(t.dtype));
    const double limit = t.dtype == Dtype::u8 ? 255.0 : 65535.0;
    for (double v : t.values) {
        if (t.dtype == Dtype::f32) {
            if (!std::isfinite(static_cast<float>(v)))
                throw ValidationError("value " + std::to_string(v) + " is not a finite float32");
            detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
            continue;
        }
        if (!(v >= 0.0 && v <= limit) || std::floor(v) != v)
            throw ValidationError("value " + std::to_string(v) + " is not representable as " +
                                  std::string(dtype_name(t.dtype)));
        const auto u = static_cast<std::uint32_t>(v);
        out.push_back(static_cast<char>(u & 0xffu));
        if (t.dtype == Dtype::u16) out.push_back(static_cast<char>(u >> 8));
    }
    return out;
}

/// Parses a TensorFile held in memory. `source` names the origin in errors.
inline Tensor decode_tensor(std::string_view bytes, const std::string& source = "<memory>") {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 12 || bytes.substr(0, 8) != tensor_magic)
        throw IoError(source + ": not a TensorFile (bad magic)");
    const std::uint32_t hlen = detail::get_u32(p + 8);
    if (hlen > max_header_bytes || 12 + static_cast<std::size_t>(hlen) > bytes.size())
        throw IoError(source + ": truncated or oversized header");

    Tensor t;
    try {
        const auto header = nlohmann::json::parse(bytes.substr(12, hlen));
        const auto& shape = header.at("shape");
        if (!shape.is_array() || !header.at("channels").is_number_unsigned() ||
            !std::all_of(shape.begin(), shape.end(),
                         [](const nlohmann::json& e) { return e.is_number_unsigned(); }))
            throw IoError(source + ": header shape/channels must be non-negative integers");
        t.shape = header.at("shape").get<std::vector<std::size_t>>();
        t.channels = header.at("channels").get<std::size_t>();
        const auto dtype = header.at("dtype").get<std::string>();
        if (dtype == "f32") t.dtype = Dtype::f32;
        else if (dtype == "u8") t.dtype = Dtype::u8;
        else if (dtype == "u16") t.dtype = Dtype::u16;
        else throw IoError(source + ": unsupported dtype '" + dtype + "'");
        if (header.contains("order") && header.at("order").get<std::string>() != "row-major")
            throw IoError(source + ": unsupported order");
    } catch (const nlohmann::json::exception& e) {
        throw IoError(source + ": invalid header: " + e.what());
    }
    if (t.shape.empty() || t.channels == 0 ||
        std::any_of(t.shape.begin(), t.shape.end(), [](std::size_t e) { return e == 0; }))
        throw IoError(source + ": header declares an empty tensor");

    const std::size_t count = t.element_count();
    const std::size_t expected = count * dtype_size(t.dtype);
    const std::size_t have = bytes.size() - 12 - hlen;
    if (have != expected)
        throw IoError(source + ": payload is " + std::to_string(have) + " bytes, expected " +
                      std::to_string(expected));

    const unsigned char* data = p + 12 + hlen;
    t.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        switch (t.dtype) {
        case Dtype::f32: {
            const float f = std::bit_cast<float>(detail::get_u32(data + 4 * k));
            if (!std::isfinite(f)) throw IoError(source + ": payload contains a non-finite value");
            t.values[k] = f;
            break;
        }
        case Dtype::u8: t.values[k] = data[k]; break;
        case Dtype::u16: t.values[k] = data[2 * k] | (data[2 * k + 1] << 8); break;
        }
    }
    return t;
}

/// Writes every (path, bytes) pair through temporary siblings and renames
/// them into place only after all writes succeeded.
inline void commit_files(std::span<const std::pair<std::filesystem::path, std::string>> files) {
    std::vector<std::filesystem::path> temps;
    auto cleanup = [&] {
        std::error_code ec;
        for (const auto& t : temps) std::filesystem::remove(t, ec);
    };
    std::random_device rd;
    for (const auto& [path, bytes] : files) {
        auto tmp = path;
        tmp += ".tmp-" + std::to_string(rd());
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) {
            cleanup();
            throw IoError("cannot write " + path.string());
        }
    }
    for (std::size_t k = 0; k < files.size(); ++k) {
        std::error_code ec;
        std::filesystem::rename(temps[k], files[k].first, ec);
        if (ec) {
            cleanup();
            throw IoError("cannot move output into place: " + files[k].first.string() + ": " +
                          ec.message());
        }
    }
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& t) {
    const std::pair<std::filesystem::path, std::string> file{path, encode_tensor(t)};
    commit_files(std::span(&file, 1));
}

inline Tensor read_tensor(const std::filesystem::path& path) {
    return decode_tensor(detail::read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Images

inline Tensor grid_to_tensor(const Grid& g, Dtype dtype = Dtype::f32) {
    return {g.shape().extents(), g.channels(), dtype, {g.values().begin(), g.values().end()}};
}

inline Grid tensor_to_grid(Tensor t, const std::string& source = "<memory>") {
    if (t.shape.size() != 2 && t.shape.size() != 3)
        throw IoError(source + ": image tensors must be 2D or 3D, got rank " +
                      std::to_string(t.shape.size()));
    return Grid(Shape(std::span<const std::size_t>(t.shape)), t.channels, std::move(t.values));
}

inline void write_grid(const std::filesystem::path& path, const Grid& g, Dtype dtype = Dtype::f32) {
    write_tensor(path, grid_to_tensor(g, dtype));
}

/// Reads a TensorFile, PNG or TIFF, chosen by file signature. Multi-page
/// TIFFs become volumes with pages as slices.
inline Grid read_image(const std::filesystem::path& path) {
    const std::string bytes = detail::read_file(path);
    const std::string name = path.string();
    if (bytes.starts_with(tensor_magic)) return tensor_to_grid(decode_tensor(bytes, name), name);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0)
        return codecs::decode_png(bytes, name);
    if (bytes.starts_with(std::string_view("II*\0", 4)) ||
        bytes.starts_with(std::string_view("MM\0*", 4)))
        return codecs::read_tiff(path);
    throw IoError(name + ": unrecognized image format");
}

// ---------------------------------------------------------------------------
// Seeds

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline bool parse_integer(const std::string& field, long long& out) {
    if (field.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stoll(field, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == field.size();
}

} // namespace detail

/// Parses seed CSV text against a grid shape. `num_classes` defaults to one
/// more than the largest class in the file.
inline SeedSet parse_seeds(std::string_view text, const Shape& shape,
                           std::optional<int> num_classes = std::nullopt,
                           const std::string& source = "<memory>") {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            header = detail::split_csv(line);
            break;
        }
    }
    const std::vector<std::string> want2{"x", "y", "class"};
    const std::vector<std::string> want3{"x", "y", "z", "class"};
    if (header.empty()) throw ValidationError(source + ": seed file has no header");
    if (header != want2 && header != want3)
        throw ValidationError(source + ": seed header must be 'x,y,class' or 'x,y,z,class'");
    const std::size_t rank = header.size() - 1;
    if (rank != shape.rank())
        throw ValidationError(source + ": seed header has " + std::to_string(rank) +
                              " coordinates but the image is " + std::to_string(shape.rank()) +
                              "D" + (shape.rank() == 3 ? " (a z column is required)" : ""));

    SeedSet set;
    std::vector<char> taken(shape.count(), 0);
    int max_class = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        ++row;
        const std::string where =
            source + ": row " + std::to_string(row) + " (line " + std::to_string(line_no) + ")";
        const auto fields = detail::split_csv(line);
        if (fields.size() != header.size())
            throw ValidationError(where + ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
        std::array<long long, 4> v{};
        for (std::size_t k = 0; k < fields.size(); ++k)
            if (!detail::parse_integer(fields[k], v[k]))
                throw ValidationError(where + ": '" + fields[k] + "' is not an integer");

        Seed seed;
        seed.location.rank = rank;
        // CSV order is x, y[, z]; coordinates are stored slowest-first.
        for (std::size_t k = 0; k < rank; ++k) {
            const std::size_t axis = rank - 1 - k;
            if (v[k] < 0 || static_cast<unsigned long long>(v[k]) >= shape[axis])
                throw ValidationError(where + ": coordinate " + header[k] + "=" +
                                      std::to_string(v[k]) + " is outside the image " +
                                      to_string(shape));
            seed.location[axis] = static_cast<std::size_t>(v[k]);
        }
        const long long cls = v[rank];
        if (cls < 1 || cls > 65535)
            throw ValidationError(where + ": class must be >= 1 (0 is background), got " +
                                  std::to_string(cls));
        seed.class_id = static_cast<int>(cls);
        seed.instance_id = static_cast<std::uint32_t>(set.seeds.size());
        char& t = taken[shape.linear(seed.location)];
        if (t) throw ValidationError(where + ": duplicate seed location");
        t = 1;
        max_class = std::max(max_class, seed.class_id);
        set.seeds.push_back(seed);
    }
    if (set.seeds.empty()) throw ValidationError(source + ": seed file contains no seeds");
    set.num_classes = num_classes.value_or(max_class + 1);
    if (set.num_classes <= max_class)
        throw ValidationError(source + ": class " + std::to_string(max_class) +
                              " does not fit num_classes=" + std::to_string(set.num_classes));
    return set;
}

inline SeedSet read_seeds(const std::filesystem::path& path, const Shape& shape,
                          std::optional<int> num_classes = std::nullopt) {
    std::string text;
    try {
        text = detail::read_file(path);
    } catch (const IoError&) {
        throw IoError("cannot open seed file " + path.string());
    }
    return parse_seeds(text, shape, num_classes, path.string());
}

/// Seeds are written in list order, so instance ids must equal row order
/// for a round trip to be exact.
inline std::string format_seeds(const SeedSet& s) {
    if (s.seeds.empty()) throw ValidationError("cannot write an empty seed set");
    const std::size_t rank = s.seeds.front().location.rank;
    std::string out = rank == 3 ? "x,y,z,class\n" : "x,y,class\n";
    for (const Seed& seed : s.seeds) {
        for (std::size_t k = 0; k < rank; ++k)
            out += std::to_string(seed.location[rank - 1 - k]) + ",";
        out += std::to_string(seed.class_id) + "\n";
    }
    return out;
}

inline void write_seeds(const std::filesystem::path& path, const SeedSet& s) {
    const std::pair<std::filesystem::path, std::string> file{path, format_seeds(s)};
    commit_files(std::span(&file, 1));
}

// ---------------------------------------------------------------------------
// Objectness maps and label maps

inline std::filesystem::path background_path(const std::filesystem::path& path) {
    auto bg = path;
    bg += ".bg";
    return bg;
}

/// P as an f32 tensor of shape (C, *grid) and the background mask as u8.
inline std::pair<Tensor, Tensor> objectness_tensors(const ObjectnessMap& m) {
    std::vector<std::size_t> shape{static_cast<std::size_t>(m.num_classes)};
    for (std::size_t e : m.shape.extents()) shape.push_back(e);
    return {Tensor{shape, 1, Dtype::f32, m.probability},
            Tensor{m.shape.extents(), 1, Dtype::u8,
                   {m.background_mask.begin(), m.background_mask.end()}}};
}

/// Writes P as f32 with shape (C, *grid) and the background mask as a u8
/// sibling `<path>.bg`. Both files appear together or not at all.
inline void write_objectness(const ObjectnessMap& m, const std::filesystem::path& path) {
    const auto [prob, mask] = objectness_tensors(m);
    const std::array<std::pair<std::filesystem::path, std::string>, 2> files{
        std::pair{path, encode_tensor(prob)},
        std::pair{background_path(path), encode_tensor(mask)}};
    commit_files(files);
}

inline ObjectnessMap objectness_from_tensor(const Tensor& t, const std::string& source) {
    if (t.dtype != Dtype::f32 || t.channels != 1 || (t.shape.size() != 3 && t.shape.size() != 4))
        throw IoError(source + ": not an objectness tensor (expected f32, shape (C, *grid))");
    ObjectnessMap m;
    m.num_classes = static_cast<int>(t.shape.front());
    m.shape = Shape(std::span<const std::size_t>(t.shape).subspan(1));
    m.probability = t.values;
    return m;
}

/// Reads P and, when the sibling exists, the background mask.
inline ObjectnessMap read_objectness(const std::filesystem::path& path) {
    ObjectnessMap m = objectness_from_tensor(read_tensor(path), path.string());
    const auto bg = background_path(path);
    if (std::filesystem::exists(bg)) {
        const Tensor mask = read_tensor(bg);
        if (mask.shape != m.shape.extents() || mask.channels != 1)
            throw IoError(bg.string() + ": mask shape does not match " + path.string());
        m.background_mask.assign(mask.values.begin(), mask.values.end());
    } else {
        m.background_mask.assign(m.pixel_count(), 0);
    }
    return m;
}

inline void write_labels(const std::filesystem::path& path, const LabelMap& labels) {
    const int top = labels.labels.empty()
                        ? 0
                        : *std::max_element(labels.labels.begin(), labels.labels.end());
    const Tensor t{labels.shape.extents(), 1, top > 255 ? Dtype::u16 : Dtype::u8,
                   {labels.labels.begin(), labels.labels.end()}};
    write_tensor(path, t);
}

inline LabelMap labels_from_tensor(const Tensor& t, const std::string& source) {
    if (t.channels != 1 || (t.shape.size() != 2 && t.shape.size() != 3))
        throw IoError(source + ": label maps must be single-channel 2D or 3D tensors");
    LabelMap m;
    m.shape = Shape(std::span<const std::size_t>(t.shape));
    m.labels.reserve(t.values.size());
    for (double v : t.values) {
        if (v < 0.0 || std::floor(v) != v) throw IoError(source + ": non-integer label value");
        m.labels.push_back(static_cast<int>(v));
    }
    return m;
}

inline LabelMap read_labels(const std::filesystem::path& path) {
    return labels_from_tensor(read_tensor(path), path.string());
}

} // namespace seedobj::io
