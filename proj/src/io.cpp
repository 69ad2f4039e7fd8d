// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxelconv/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "voxelconv/error.hpp"

namespace voxelconv {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 32;

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
    return static_cast<std::uint8_t>(in[pos]) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + 3])) << 24);
}

}  // namespace

std::string tensor_to_bytes(const SparseTensor& t) {
    std::string out;
    const std::size_t n = static_cast<std::size_t>(t.n());
    out.reserve(kHeaderBytes + 16 * n + 4 * t.features().size());
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(t.shape().batches));
    put_u32(out, static_cast<std::uint32_t>(t.n()));
    put_u32(out, static_cast<std::uint32_t>(t.channels()));
    put_u32(out, static_cast<std::uint32_t>(t.shape().max_x));
    put_u32(out, static_cast<std::uint32_t>(t.shape().max_y));
    put_u32(out, static_cast<std::uint32_t>(t.shape().max_z));
    const IndexSet& s = t.sites();
    for (const auto* arr : {&s.batch, &s.x, &s.y, &s.z}) {
        for (std::int32_t v : *arr) put_u32(out, static_cast<std::uint32_t>(v));
    }
    for (float f : t.features()) put_u32(out, std::bit_cast<std::uint32_t>(f));
    return out;
}

void save_tensor(const SparseTensor& t, std::ostream& out) {
    const std::string bytes = tensor_to_bytes(t);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("tensor write failed");
}

void save_tensor(const SparseTensor& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    save_tensor(t, out);
}

SparseTensor tensor_from_bytes(const std::string& bytes) {
    if (bytes.size() < 4) throw TruncatedError("file shorter than the magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw BadMagicError("not a sparse tensor file");
    }
    if (bytes.size() < kHeaderBytes) throw TruncatedError("incomplete header");
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kVersion) {
        throw VersionUnsupportedError("unsupported version " + std::to_string(version));
    }
    const std::uint32_t batches = get_u32(bytes, 8);
    const std::uint32_t n = get_u32(bytes, 12);
    const std::uint32_t channels = get_u32(bytes, 16);
    const std::uint32_t max_x = get_u32(bytes, 20);
    const std::uint32_t max_y = get_u32(bytes, 24);
    const std::uint32_t max_z = get_u32(bytes, 28);
    if (batches > INT32_MAX || n > INT32_MAX || channels > INT32_MAX || max_x > INT32_MAX ||
        max_y > INT32_MAX || max_z > INT32_MAX) {
        throw InvariantViolationError("header field exceeds the signed 32-bit range");
    }

    const std::uint64_t expected =
        kHeaderBytes + 16ull * n + 4ull * n * channels;
    if (bytes.size() < expected) {
        throw TruncatedError("payload shorter than the header promises (" +
                             std::to_string(bytes.size()) + " of " + std::to_string(expected) +
                             " bytes)");
    }
    if (bytes.size() > expected) {
        throw InvariantViolationError("unexpected trailing bytes after the payload");
    }

    const GridShape shape{static_cast<std::int32_t>(max_x), static_cast<std::int32_t>(max_y),
                          static_cast<std::int32_t>(max_z), static_cast<std::int32_t>(batches)};
    if (!shape.valid()) throw InvariantViolationError("invalid grid shape in header");

    std::size_t pos = kHeaderBytes;
    auto read_i32s = [&](std::size_t count) {
        std::vector<std::int32_t> out(count);
        for (std::size_t i = 0; i < count; ++i, pos += 4) {
            out[i] = static_cast<std::int32_t>(get_u32(bytes, pos));
        }
        return out;
    };
    std::vector<std::int32_t> batch = read_i32s(n);
    std::vector<std::int32_t> x = read_i32s(n);
    std::vector<std::int32_t> y = read_i32s(n);
    std::vector<std::int32_t> z = read_i32s(n);
    std::vector<float> features(static_cast<std::size_t>(n) * channels);
    for (std::size_t i = 0; i < features.size(); ++i, pos += 4) {
        features[i] = std::bit_cast<float>(get_u32(bytes, pos));
    }

    const auto issues = validate(shape, batch, x, y, z, features.size(),
                                 static_cast<std::int32_t>(channels));
    if (!issues.empty()) {
        throw InvariantViolationError("payload violates tensor invariants: " +
                                      to_string(issues.front()));
    }
    return SparseTensor(shape, std::move(batch), std::move(x), std::move(y), std::move(z),
                        std::move(features), static_cast<std::int32_t>(channels));
}

SparseTensor load_tensor(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return tensor_from_bytes(buffer.str());
}

SparseTensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return load_tensor(in);
}

void save_weights(const WeightTensor& w, std::int32_t kernel,
                  const std::filesystem::path& path) {
    if (static_cast<std::int64_t>(kernel) * kernel * kernel != w.kernel_volume) {
        throw ShapeMismatchError("kernel size does not match the weight kernel volume");
    }
    nlohmann::json doc;
    doc["out_channels"] = w.out_channels;
    doc["in_channels"] = w.in_channels;
    doc["kernel"] = kernel;
    doc["layout"] = "oc_koff_ic";
    doc["values"] = w.values;
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
}

LoadedWeights load_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed weight file " + path.string() + ": " + e.what());
    }
    try {
        const std::string layout = doc.at("layout").get<std::string>();
        if (layout != "oc_koff_ic") throw Error("unsupported weight layout '" + layout + "'");
        const std::int32_t kernel = doc.at("kernel").get<std::int32_t>();
        if (kernel < 1) throw Error("kernel must be positive");
        LoadedWeights loaded;
        loaded.kernel = kernel;
        loaded.weights = WeightTensor::create(doc.at("out_channels").get<std::int32_t>(),
                                              doc.at("in_channels").get<std::int32_t>(),
                                              kernel * kernel * kernel,
                                              doc.at("values").get<std::vector<float>>());
        return loaded;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed weight file " + path.string() + ": " + e.what());
    }
}

namespace {

bool parse_float(const std::string& field, float& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto result = std::from_chars(begin, end, out);
    return result.ec == std::errc{} && result.ptr == end;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string field = line.substr(start, comma - start);
        // trim surrounding whitespace
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? std::string{}
                                                    : field.substr(first, last - first + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

}  // namespace

std::vector<PointRecord> load_points(std::istream& in) {
    std::vector<PointRecord> points;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    std::size_t channels = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> fields = split_csv(line);
        float probe;
        if (first_data_line && !parse_float(fields[0], probe)) continue;  // header line
        if (fields.size() < 4) {
            throw Error("line " + std::to_string(line_no) + ": expected batch,fx,fy,fz,features");
        }
        PointRecord p;
        float batch_field;
        if (!parse_float(fields[0], batch_field) || !parse_float(fields[1], p.x) ||
            !parse_float(fields[2], p.y) || !parse_float(fields[3], p.z)) {
            throw Error("line " + std::to_string(line_no) + ": malformed numeric field");
        }
        p.batch = static_cast<std::int32_t>(batch_field);
        p.features.reserve(fields.size() - 4);
        for (std::size_t i = 4; i < fields.size(); ++i) {
            float v;
            if (!parse_float(fields[i], v)) {
                throw Error("line " + std::to_string(line_no) + ": malformed feature value");
            }
            p.features.push_back(v);
        }
        if (first_data_line) {
            channels = p.features.size();
            first_data_line = false;
        } else if (p.features.size() != channels) {
            throw LengthMismatchError("line " + std::to_string(line_no) +
                                      ": inconsistent feature width");
        }
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<PointRecord> load_points(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return load_points(in);
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed config file " + path.string() + ": " + e.what());
    }
    EngineConfig config;
    if (doc.contains("lct.dense_threshold")) {
        config.lct_dense_threshold = doc["lct.dense_threshold"].get<std::int64_t>();
    } else if (doc.contains("lct") && doc["lct"].contains("dense_threshold")) {
        config.lct_dense_threshold = doc["lct"]["dense_threshold"].get<std::int64_t>();
    }
    if (config.lct_dense_threshold < 0) throw Error("lct.dense_threshold must be non-negative");
    return config;
}

}  // namespace voxelconv
