#include <grafkit/mask.hpp>

namespace grafkit {

const char* structure_name(StructureId id) {
    switch (id) {
    case StructureId::flat_ilium: return "flat_ilium";
    case StructureId::lower_limb: return "lower_limb";
    case StructureId::labrum: return "labrum";
    case StructureId::co_junction: return "co_junction";
    }
    return "unknown";
}

const char* landmark_name(int index) {
    switch (index) {
    case 0: return "bony_rim";
    case 1: return "lower_limb_point";
    case 2: return "labrum_midpoint";
    }
    return "unknown";
}

void StructureSet::validate() const {
    const BinaryMask* ref = nullptr;
    for (const auto& m : masks) {
        if (!m) continue;
        if (ref && !ref->same_size(*m)) {
            throw DimensionError("structure masks disagree on dimensions");
        }
        if (!ref) ref = &*m;
    }
}

} // namespace grafkit
