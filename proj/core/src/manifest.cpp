#include <grafkit/manifest.hpp>

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include <grafkit/image_io.hpp>

namespace grafkit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string& field, const std::string& what) {
    throw SchemaError("manifest line " + std::to_string(line) + ", field '" + field +
                      "': " + what);
}

std::optional<BinaryMask> read_mask_entry(const json& obj, const char* key,
                                          std::size_t line,
                                          const std::filesystem::path& baseDir,
                                          int width, int height, int threshold) {
    if (!obj.contains(key)) return std::nullopt;
    const json& e = obj.at(key);
    if (!e.is_object()) fail(line, key, "expected an object with 'png' or 'rle'");

    BinaryMask mask = [&]() {
        if (e.contains("png")) {
            if (!e.at("png").is_string()) fail(line, key, "'png' must be a path string");
            const std::filesystem::path p =
                baseDir / std::filesystem::path(e.at("png").get<std::string>());
            try {
                return decode_mask_file(p, threshold);
            } catch (const Error& err) {
                fail(line, key, err.what());
            }
        }
        if (e.contains("rle")) {
            if (!e.at("rle").is_string()) fail(line, key, "'rle' must be a string");
            try {
                return decode_rle(e.at("rle").get<std::string>(), width, height);
            } catch (const Error& err) {
                fail(line, key, err.what());
            }
        }
        fail(line, key, "needs either 'png' or 'rle'");
    }();

    if (mask.width() != width || mask.height() != height) {
        fail(line, key, "mask is " + std::to_string(mask.width()) + "x" +
                        std::to_string(mask.height()) + " but the record declares " +
                        std::to_string(width) + "x" + std::to_string(height));
    }
    return mask;
}

std::optional<LandmarkPoint> read_point_entry(const json& obj, const char* key,
                                              std::size_t line, int width, int height,
                                              LandmarkSource source) {
    if (!obj.contains(key)) return std::nullopt;
    const json& e = obj.at(key);
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        fail(line, key, "expected [x, y]");
    }
    LandmarkPoint p{e[0].get<double>(), e[1].get<double>(), source};
    if (p.x < 0.0 || p.x >= width || p.y < 0.0 || p.y >= height) {
        fail(line, key, "landmark outside scene bounds");
    }
    return p;
}

void mirror_point(std::optional<LandmarkPoint>& p, int width) {
    if (p) p->x = static_cast<double>(width - 1) - p->x;
}

} // namespace

std::vector<SceneRecord> load_manifest(const std::filesystem::path& path,
                                       int mask_threshold) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open manifest " + path.string());
    const std::filesystem::path baseDir = path.parent_path();

    std::vector<SceneRecord> records;
    std::unordered_set<std::string> seenIds;
    std::string lineText;
    std::size_t lineNo = 0;
    while (std::getline(in, lineText)) {
        ++lineNo;
        if (lineText.find_first_not_of(" \t\r") == std::string::npos) continue;

        json obj;
        try {
            obj = json::parse(lineText);
        } catch (const json::exception& e) {
            throw SchemaError("manifest line " + std::to_string(lineNo) +
                              ": invalid JSON: " + e.what());
        }
        if (!obj.is_object()) fail(lineNo, "<record>", "line is not a JSON object");

        for (const char* req : {"scene_id", "width", "height", "laterality"}) {
            if (!obj.contains(req)) fail(lineNo, req, "required field missing");
        }

        SceneRecord rec;
        if (!obj.at("scene_id").is_string()) fail(lineNo, "scene_id", "must be a string");
        rec.scene_id = obj.at("scene_id").get<std::string>();
        if (!seenIds.insert(rec.scene_id).second) {
            fail(lineNo, "scene_id", "duplicate scene_id '" + rec.scene_id + "'");
        }
        if (!obj.at("width").is_number_integer() || !obj.at("height").is_number_integer()) {
            fail(lineNo, "width", "width/height must be integers");
        }
        rec.width = obj.at("width").get<int>();
        rec.height = obj.at("height").get<int>();
        if (rec.width < 1 || rec.height < 1) fail(lineNo, "width", "dimensions must be >= 1");

        const std::string lat = obj.at("laterality").is_string()
                                    ? obj.at("laterality").get<std::string>()
                                    : std::string();
        if (lat != "left" && lat != "right") {
            fail(lineNo, "laterality", "must be \"left\" or \"right\"");
        }
        rec.structures.laterality = lat == "left" ? Laterality::left : Laterality::right;

        static constexpr const char* kStructKeys[4] = {"s1", "s2", "s3", "s4"};
        for (int s = 0; s < 4; ++s) {
            rec.structures.masks[s] = read_mask_entry(obj, kStructKeys[s], lineNo, baseDir,
                                                      rec.width, rec.height, mask_threshold);
        }

        static constexpr const char* kPredKeys[3] = {"pk1", "pk2", "pk3"};
        for (int i = 0; i < 3; ++i) {
            rec.predicted_landmarks[i] = read_point_entry(obj, kPredKeys[i], lineNo,
                                                          rec.width, rec.height,
                                                          LandmarkSource::predicted);
        }

        if (obj.contains("gt")) {
            const json& gt = obj.at("gt");
            if (!gt.is_object()) fail(lineNo, "gt", "must be an object");
            GroundTruth truth;
            for (int s = 0; s < 4; ++s) {
                truth.masks[s] = read_mask_entry(gt, kStructKeys[s], lineNo, baseDir,
                                                 rec.width, rec.height, mask_threshold);
            }
            static constexpr const char* kGtPointKeys[3] = {"p1", "p2", "p3"};
            for (int i = 0; i < 3; ++i) {
                truth.landmarks[i] = read_point_entry(gt, kGtPointKeys[i], lineNo,
                                                      rec.width, rec.height,
                                                      LandmarkSource::mask_derived);
            }
            for (const char* angleKey : {"alpha", "beta"}) {
                if (!gt.contains(angleKey)) continue;
                if (!gt.at(angleKey).is_number()) fail(lineNo, angleKey, "must be a number");
                const double v = gt.at(angleKey).get<double>();
                if (v <= 0.0 || v >= 180.0) {
                    fail(lineNo, angleKey, "angle must lie in (0, 180)");
                }
                (angleKey[0] == 'a' ? truth.alpha : truth.beta) = v;
            }
            rec.ground_truth = std::move(truth);
        }

        for (const char* probKey : {"lm_labels", "lm_probs"}) {
            if (!obj.contains(probKey)) continue;
            const json& arr = obj.at(probKey);
            if (!arr.is_array()) fail(lineNo, probKey, "must be an array of numbers");
            std::vector<double> v;
            v.reserve(arr.size());
            for (const auto& e : arr) {
                if (!e.is_number()) fail(lineNo, probKey, "must be an array of numbers");
                v.push_back(e.get<double>());
            }
            (probKey[3] == 'l' ? rec.landmark_labels : rec.landmark_probs) = std::move(v);
        }

        if (rec.structures.laterality == Laterality::right) {
            for (auto& m : rec.structures.masks) {
                if (m) m = m->mirrored_x();
            }
            for (auto& p : rec.predicted_landmarks) mirror_point(p, rec.width);
            if (rec.ground_truth) {
                for (auto& m : rec.ground_truth->masks) {
                    if (m) m = m->mirrored_x();
                }
                for (auto& p : rec.ground_truth->landmarks) mirror_point(p, rec.width);
            }
        }

        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace grafkit
