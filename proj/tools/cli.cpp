#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <grafkit/manifest.hpp>

namespace grafkit::cli {

namespace {

void run_indexed(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int count = std::min<std::size_t>(workers, n);
    pool.reserve(count);
    for (int w = 0; w < count; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt3_opt(const std::optional<double>& v) {
    return v ? fmt3(*v) : std::string();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

std::string join_warnings(const std::vector<std::string>& warnings) {
    std::string out;
    for (const auto& w : warnings) {
        if (!out.empty()) out += "; ";
        out += w;
    }
    return out;
}

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(std::string("cannot write output file ") + name);
    return out;
}

struct TruthAngles {
    std::optional<double> alpha;
    std::optional<double> beta;
};

// Reference angles: the annotated values when present, otherwise the same
// measurement pipeline run on the ground-truth masks and landmarks.
TruthAngles truth_angles(const SceneRecord& rec, const MeasureConfig& mcfg,
                         std::vector<std::string>& warnings) {
    TruthAngles out;
    const GroundTruth& gt = *rec.ground_truth;
    out.alpha = gt.alpha;
    out.beta = gt.beta;
    if (out.alpha && out.beta) return out;

    StructureSet truthSet;
    truthSet.masks = gt.masks;
    truthSet.laterality = rec.structures.laterality;
    try {
        const MeasurementReport ref = measure_scene(truthSet, gt.landmarks, mcfg);
        if (!out.alpha) out.alpha = ref.alpha;
        if (!out.beta) out.beta = ref.beta;
    } catch (const Error& e) {
        warnings.push_back(std::string("truth angles unavailable: ") + e.what());
    }
    return out;
}

} // namespace

int run_measure(const RunConfig& config) {
    const std::vector<SceneRecord> records = load_manifest(config.manifest);
    const MeasureConfig mcfg{config.fit, config.graf_cutoff_deg};

    std::vector<std::string> lines(records.size());
    std::vector<char> failed(records.size(), 0);
    run_indexed(records.size(), config.workers, [&](std::size_t i) {
        const SceneRecord& rec = records[i];
        std::string line = csv_escape(rec.scene_id) + ",";
        try {
            const MeasurementReport r =
                measure_scene(rec.structures, rec.predicted_landmarks, mcfg);
            line += fmt3(r.alpha) + "," + fmt3(r.beta) + "," + graf_type_name(r.graf_type) +
                    "," + (r.standard_plane ? "true" : "false");
            for (int k = 0; k < 3; ++k) {
                const LandmarkPoint& p = r.landmarks_used[k];
                line += "," + fmt3(p.x) + "," + fmt3(p.y);
            }
            line += "," + csv_escape(join_warnings(r.warnings));
        } catch (const Error& e) {
            line += ",,,,,,,,,," + csv_escape(std::string("error: ") + e.what());
            failed[i] = 1;
        }
        lines[i] = std::move(line);
    });

    std::ofstream out = open_output(config.out_dir, "measurements.csv");
    out << "scene_id,alpha,beta,graf_type,standard_plane,"
           "p1_x,p1_y,p2_x,p2_y,p3_x,p3_y,warnings\n";
    for (const std::string& line : lines) out << line << "\n";

    for (char f : failed) {
        if (f) return kExitSceneFailures;
    }
    return kExitOk;
}

int run_evaluate(const RunConfig& config, EvalSummary* summary_out) {
    const std::vector<SceneRecord> records = load_manifest(config.manifest);
    const MeasureConfig mcfg{config.fit, config.graf_cutoff_deg};

    std::vector<EvalRecord> evals(records.size());
    std::vector<char> failed(records.size(), 0);
    std::atomic<std::size_t> evaluated{0};

    run_indexed(records.size(), config.workers, [&](std::size_t i) {
        const SceneRecord& rec = records[i];
        EvalRecord& ev = evals[i];
        ev.scene_id = rec.scene_id;
        if (!rec.ground_truth) {
            ev.warnings.push_back("skipped: record has no ground truth");
            return;
        }
        evaluated.fetch_add(1);
        const GroundTruth& gt = *rec.ground_truth;

        for (int s = 0; s < 4; ++s) {
            const auto& pred = rec.structures.masks[s];
            const auto& ref = gt.masks[s];
            if (!pred && !ref) continue;
            if (pred && ref) {
                ev.dsc[s] = dsc(*pred, *ref);
                try {
                    ev.hd[s] = hausdorff(*pred, *ref);
                } catch (const EmptyMaskError&) {
                    ev.warnings.push_back(std::string(structure_name(
                                              static_cast<StructureId>(s))) +
                                          ": Hausdorff undefined for empty mask");
                }
            } else {
                ev.dsc[s] = 0.0; // structure missing on one side
            }
        }

        std::optional<MeasurementReport> report;
        try {
            report = measure_scene(rec.structures, rec.predicted_landmarks, mcfg);
        } catch (const Error& e) {
            ev.warnings.push_back(std::string("measurement failed: ") + e.what());
            failed[i] = 1;
        }
        const TruthAngles truth = truth_angles(rec, mcfg, ev.warnings);

        if (report) {
            ev.alpha_pred = report->alpha;
            ev.beta_pred = report->beta;
            ev.predicted_type = report->graf_type;
            for (int k = 0; k < 3; ++k) {
                if (gt.landmarks[k]) {
                    ev.landmark_dist[k] =
                        landmark_error(report->landmarks_used[k], *gt.landmarks[k]);
                }
            }
            ev.warnings.insert(ev.warnings.end(), report->warnings.begin(),
                               report->warnings.end());
        }
        ev.alpha_true = truth.alpha;
        ev.beta_true = truth.beta;
        if (truth.alpha) ev.true_type = classify_graf(*truth.alpha, config.graf_cutoff_deg);
        if (report && truth.alpha && truth.beta) {
            const AngleErrors err = angle_errors(*report, *truth.alpha, *truth.beta);
            ev.alpha_error = err.alpha_error;
            ev.beta_error = err.beta_error;
        }
    });

    if (evaluated.load() == 0) {
        throw Error("evaluate: no record carries ground truth");
    }

    std::ofstream rows = open_output(config.out_dir, "records.csv");
    rows << "scene_id";
    for (int s = 0; s < 4; ++s) rows << ",dsc_" << structure_name(static_cast<StructureId>(s));
    for (int s = 0; s < 4; ++s) rows << ",hd_" << structure_name(static_cast<StructureId>(s));
    for (int k = 0; k < 3; ++k) rows << ",dist_" << landmark_name(k);
    rows << ",alpha_pred,alpha_true,alpha_error,beta_pred,beta_true,beta_error,"
            "predicted_type,true_type,warnings\n";
    for (const EvalRecord& ev : evals) {
        rows << csv_escape(ev.scene_id);
        for (int s = 0; s < 4; ++s) rows << "," << fmt3_opt(ev.dsc[s]);
        for (int s = 0; s < 4; ++s) rows << "," << fmt3_opt(ev.hd[s]);
        for (int k = 0; k < 3; ++k) rows << "," << fmt3_opt(ev.landmark_dist[k]);
        rows << "," << fmt3_opt(ev.alpha_pred) << "," << fmt3_opt(ev.alpha_true) << ","
             << fmt3_opt(ev.alpha_error) << "," << fmt3_opt(ev.beta_pred) << ","
             << fmt3_opt(ev.beta_true) << "," << fmt3_opt(ev.beta_error) << ","
             << (ev.predicted_type ? graf_type_name(*ev.predicted_type) : "") << ","
             << (ev.true_type ? graf_type_name(*ev.true_type) : "") << ","
             << csv_escape(join_warnings(ev.warnings)) << "\n";
    }

    const EvalSummary summary = summarize(evals, config.thresholds, config.std_mode);
    if (summary_out) *summary_out = summary;

    auto write_cdf = [&](const char* name, const AngleSummary& angle) {
        std::ofstream cdf = open_output(config.out_dir, name);
        cdf << "threshold_deg,fraction\n";
        for (const auto& [threshold, fraction] : angle.cdf) {
            cdf << fmt3(threshold) << "," << fmt3(fraction) << "\n";
        }
    };
    write_cdf("cdf_alpha.csv", summary.alpha);
    write_cdf("cdf_beta.csv", summary.beta);

    std::ofstream rep = open_output(config.out_dir, "summary.txt");
    auto stat_cell = [](const std::optional<Stat>& s) {
        return s ? fmt3(s->mean) + " (" + fmt3(s->stddev) + ")" : std::string("-");
    };
    rep << "scenes evaluated: " << evaluated.load() << " of " << records.size() << "\n\n";
    rep << "angle measurement (deg)\n";
    rep << "  metric                     alpha      beta\n";
    rep << "  mean abs error             " << fmt3(summary.alpha.error.mean) << "      "
        << fmt3(summary.beta.error.mean) << "\n";
    rep << "  std                        " << fmt3(summary.alpha.error.stddev) << "      "
        << fmt3(summary.beta.error.stddev) << "\n";
    rep << "  success rate (<" << fmt3(config.thresholds.success_deg) << " deg)  "
        << fmt3(summary.alpha.success_rate) << "      " << fmt3(summary.beta.success_rate)
        << "\n";
    rep << "  poor rate (>" << fmt3(config.thresholds.poor_deg) << " deg)    "
        << fmt3(summary.alpha.poor_rate) << "      " << fmt3(summary.beta.poor_rate)
        << "\n";
    rep << "  pearson r                  " << fmt3(summary.alpha.pearson) << "      "
        << fmt3(summary.beta.pearson) << "\n\n";
    rep << "misclassification (fraction of typed records)\n";
    rep << "  overall " << fmt3(summary.misclassification.overall) << "  FN "
        << fmt3(summary.misclassification.false_negative) << "  FP "
        << fmt3(summary.misclassification.false_positive) << "\n\n";
    rep << "segmentation mean (std) per structure\n";
    rep << "  structure     DSC              HD (px)\n";
    for (int s = 0; s < 4; ++s) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "  %-12s  %-15s  %-15s\n",
                      structure_name(static_cast<StructureId>(s)),
                      stat_cell(summary.dsc[s]).c_str(), stat_cell(summary.hd[s]).c_str());
        rep << buf;
    }
    rep << "\nlandmark distance mean (std), px\n";
    for (int k = 0; k < 3; ++k) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "  %-18s  %s\n", landmark_name(k),
                      stat_cell(summary.landmark[k]).c_str());
        rep << buf;
    }

    for (char f : failed) {
        if (f) return kExitSceneFailures;
    }
    return kExitOk;
}

int run_losses(const RunConfig& config) {
    const std::vector<SceneRecord> records = load_manifest(config.manifest);

    struct Row {
        std::string line;
        std::optional<double> ss, br, ce, composite;
        bool failed = false;
    };
    std::vector<Row> rows(records.size());

    run_indexed(records.size(), config.workers, [&](std::size_t i) {
        const SceneRecord& rec = records[i];
        Row& row = rows[i];
        std::string warn;
        try {
            if (!rec.ground_truth) throw MeasureError("record has no ground truth");
            StructureSet truthSet;
            truthSet.masks = rec.ground_truth->masks;
            truthSet.laterality = rec.structures.laterality;
            row.ss = shape_similarity_score(rec.structures, truthSet, config.fit).total;

            if (rec.predicted_landmarks[0]) {
                const InferredLandmarks inferred =
                    infer_landmarks_from_masks(rec.structures);
                if (inferred.points[0]) {
                    row.br = bony_rim_distance(*inferred.points[0],
                                               *rec.predicted_landmarks[0]);
                }
            }
            if (rec.landmark_labels && rec.landmark_probs) {
                row.ce = cross_entropy(*rec.landmark_labels, *rec.landmark_probs);
            }
            row.composite = composite_score(0.0, row.ce.value_or(0.0),
                                            row.br.value_or(0.0), *row.ss, config.weights);
        } catch (const Error& e) {
            warn = std::string("error: ") + e.what();
            row.failed = true;
        }
        row.line = csv_escape(rec.scene_id) + "," + fmt3_opt(row.ss) + "," +
                   fmt3_opt(row.br) + "," + fmt3_opt(row.ce) + "," +
                   fmt3_opt(row.composite) + "," + csv_escape(warn);
    });

    double ssTotal = 0.0, brTotal = 0.0, ceTotal = 0.0, compositeTotal = 0.0;
    bool anyFailed = false;
    for (const Row& row : rows) {
        ssTotal += row.ss.value_or(0.0);
        brTotal += row.br.value_or(0.0);
        ceTotal += row.ce.value_or(0.0);
        compositeTotal += row.composite.value_or(0.0);
        anyFailed = anyFailed || row.failed;
    }

    std::ofstream out = open_output(config.out_dir, "losses.csv");
    out << "scene_id,ss,br,landmark_ce,composite,warnings\n";
    for (const Row& row : rows) out << row.line << "\n";
    out << "TOTAL," << fmt3(ssTotal) << "," << fmt3(brTotal) << "," << fmt3(ceTotal) << ","
        << fmt3(compositeTotal) << ",\n";
    return anyFailed ? kExitSceneFailures : kExitOk;
}

int run_phantom(const PhantomArgs& args) {
    const std::vector<PhantomScene> scenes =
        generate_batch(args.count, args.angles, args.base, args.seed);
    DatasetOptions options;
    options.include_ground_truth = args.include_ground_truth;
    options.include_truth_angles = args.include_truth_angles;
    const std::filesystem::path manifest = write_dataset(scenes, args.out_dir, options);

    std::cout << "scene_id       alpha_true  beta_true\n";
    for (const PhantomScene& s : scenes) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%-13s  %10s  %9s\n", s.scene_id.c_str(),
                      fmt3(s.alpha_true).c_str(), fmt3(s.beta_true).c_str());
        std::cout << buf;
    }
    std::cout << "manifest: " << manifest.string() << "\n";
    return kExitOk;
}

} // namespace grafkit::cli
