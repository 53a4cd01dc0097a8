#pragma once

#include <cstdint>

#include "odseg/image.hpp"

namespace odseg {

enum class PhantomKind {
    Standard,       // bright disk, vessel tree, background texture
    Distractor,     // plus a bright vessel-free circle elsewhere
    Dim,            // dim disk plus a rim-glare ring: forces fraction iteration
    SplitContrast,  // strongly unequal temporal/nasal halves
};

struct PhantomSpec {
    int width = 565;  // DRIVE-sized canvas
    int height = 584;
    std::uint64_t seed = 0;
    PhantomKind kind = PhantomKind::Standard;
};

struct Phantom {
    GrayImage image;
    BinaryMask gt_disk;
    PointF disk_center;
    double diameter_h = 0.0;
    double diameter_v = 0.0;
    int trunk_col = 0;  // column of the major vertical vessel at disk height
    PhantomKind kind = PhantomKind::Standard;
};

/// Deterministic synthetic fundus image with ground truth: elliptical disk
/// (brighter temporal half), converging vessel tree with a vertical trunk
/// through the disk, circular field of view on a black surround, and smooth
/// background texture. The trunk always intersects the ground-truth disk.
Phantom make_phantom(const PhantomSpec& spec);

/// Stable per-item seed derivation for batches.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

const char* phantom_kind_name(PhantomKind kind);

}  // namespace odseg
