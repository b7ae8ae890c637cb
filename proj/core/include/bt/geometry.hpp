#pragma once

#include <optional>
#include <string>

namespace bt {

enum class GeometryKind { Interval, Disk, Imported };

enum class Parity { Symmetric, Antisymmetric, None };

struct Geometry {
    GeometryKind kind = GeometryKind::Interval;
    // Length of the interval or diameter of the disk, in length units L.
    double extent = 1.0;
    // Source file for imported matrices (Imported only).
    std::string import_path;
};

struct LaplaceMode {
    int index = 0;            // 1-based, ordered by eigenvalue
    double eigenvalue = 0.0;  // units 1/L^2, index 1 is the constant mode (0)
    Parity parity_x = Parity::None;
    Parity parity_y = Parity::None;
    std::optional<int> angular_index;  // disk only
};

const char* to_string(GeometryKind kind);
const char* to_string(Parity parity);

}  // namespace bt
