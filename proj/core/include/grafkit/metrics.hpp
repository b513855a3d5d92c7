#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <grafkit/mask.hpp>
#include <grafkit/measure.hpp>

namespace grafkit {

/// Dice similarity coefficient 2|X n Y| / (|X| + |Y|) over foreground pixels.
/// Two empty masks agree perfectly (1.0); exactly one empty scores 0.0.
/// Throws DimensionError on mismatched dimensions.
double dsc(const BinaryMask& x, const BinaryMask& y);

/// Exact symmetric Hausdorff distance between the foreground pixel sets,
/// computed with an exact Euclidean distance transform. Throws
/// EmptyMaskError when either mask is empty, DimensionError on size mismatch.
double hausdorff(const BinaryMask& x, const BinaryMask& y);

/// Euclidean distance between a predicted and a reference landmark.
double landmark_error(const LandmarkPoint& predicted, const LandmarkPoint& reference);

struct AngleErrors {
    double alpha_error = 0.0;
    double beta_error = 0.0;
};

/// Absolute angle differences in degrees.
AngleErrors angle_errors(const MeasurementReport& predicted, double alpha_true,
                         double beta_true);

/// Per-scene evaluation row. Optional fields stay empty when the scene lacks
/// the data needed to compute them; aggregation skips empties.
struct EvalRecord {
    std::string scene_id;
    std::array<std::optional<double>, 4> dsc;
    std::array<std::optional<double>, 4> hd;
    std::array<std::optional<double>, 3> landmark_dist;
    std::optional<double> alpha_pred, beta_pred;
    std::optional<double> alpha_true, beta_true;
    std::optional<double> alpha_error, beta_error;
    std::optional<GrafType> predicted_type, true_type;
    std::vector<std::string> warnings;
};

struct SummaryThresholds {
    double success_deg = 5.0;
    double poor_deg = 10.0;
};

enum class StdMode { population, sample };

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;
    int n = 0;
};

/// Aggregate view of one angle: error stats, success (< success_deg) and poor
/// (> poor_deg) fractions, the empirical CDF of absolute errors, and the
/// Pearson correlation between predicted and reference angles.
struct AngleSummary {
    Stat error;
    double success_rate = 0.0;
    double poor_rate = 0.0;
    std::vector<std::pair<double, double>> cdf; // (error threshold, fraction <=)
    double pearson = 0.0;
};

struct MisclassificationRates {
    double overall = 0.0;
    double false_negative = 0.0; // true type II called type I
    double false_positive = 0.0; // true type I called type II
};

struct EvalSummary {
    AngleSummary alpha;
    AngleSummary beta;
    std::array<std::optional<Stat>, 4> dsc;
    std::array<std::optional<Stat>, 4> hd;
    std::array<std::optional<Stat>, 3> landmark;
    MisclassificationRates misclassification;
    int n_records = 0;
};

/// Folds evaluation records into the summary tables. Throws DomainError on an
/// empty record list. Misclassification counts are fractions of all records
/// carrying both type labels, so FN + FP = overall.
EvalSummary summarize(std::span<const EvalRecord> records,
                      const SummaryThresholds& thresholds = {},
                      StdMode std_mode = StdMode::population);

/// Pearson correlation coefficient of two equal-length samples.
double pearson(std::span<const double> a, std::span<const double> b);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    int df = 0;
};

/// Pooled-variance two-sample t-test (df = n_a + n_b - 2) with a two-sided
/// p-value. Zero pooled variance yields t = 0, p = 1 for equal means and an
/// infinite-t sentinel (p = 0) otherwise.
TTestResult two_sample_t(std::span<const double> a, std::span<const double> b);

} // namespace grafkit
