#pragma once

#include "elastiform/bva.hpp"
#include "elastiform/loads.hpp"
#include "elastiform/material.hpp"
#include "elastiform/mesh.hpp"

#include <map>
#include <string>

namespace ef {

// Plain key=value configuration, one pair per line, '#' comments.
// Unknown keys are rejected at parse time.
struct RunConfig {
    std::map<std::string, std::string> kv;

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
};

enum class GeometryKind { Bulky, Holes6 };

struct Setup {
    GeometryKind geometry_kind = GeometryKind::Bulky;
    GeometryConfig geo;
    MaterialParams material;
    LoadSpec loads;
    BvaConfig bva;
    int study_levels = 3;
    int study_extra_refine = 2;
    std::string out_dir = ".";
    std::string tag = "run";
    std::string mesh_file; // optional: read instead of generating
    int check_quad_order = 4;
    std::uint64_t seed = 42;
};

// Materializes and range-checks a typed setup. Throws ConfigError.
Setup build_setup(const RunConfig& cfg);

// Generated geometry or mesh_file when given.
Mesh build_mesh(const Setup& setup);

} // namespace ef
