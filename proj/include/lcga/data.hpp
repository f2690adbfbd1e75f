#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lcga {

// N subjects observed on a shared, strictly increasing grid of T times.
// Immutable once constructed; the constructor enforces every invariant.
class TrajectoryDataset {
public:
    TrajectoryDataset(std::vector<std::string> subject_ids,
                      Eigen::VectorXd times,
                      Eigen::MatrixXd outcomes);

    const std::vector<std::string>& subject_ids() const { return subject_ids_; }
    const Eigen::VectorXd& times() const { return times_; }
    // Row i is subject i's trajectory.
    const Eigen::MatrixXd& outcomes() const { return outcomes_; }

    Eigen::Index n_subjects() const { return outcomes_.rows(); }
    Eigen::Index n_times() const { return outcomes_.cols(); }

    // Population variance of all y_it.
    double outcome_variance() const;

    friend bool operator==(const TrajectoryDataset& a, const TrajectoryDataset& b);

private:
    std::vector<std::string> subject_ids_;
    Eigen::VectorXd times_;
    Eigen::MatrixXd outcomes_;
};

struct LongRow {
    std::string id;
    double time = 0.0;
    double value = 0.0;
    // 1-based source line, 0 when the row did not come from a file.
    std::size_t line = 0;
};

// Groups rows by id (first-appearance order) and sorts each subject's
// observations by time. Every subject must be observed on the same grid.
// Throws RaggedData, DuplicateCell or NonNumeric.
TrajectoryDataset load_long(std::span<const LongRow> rows);

// Stacks the selected subjects' rows. Duplicated subjects get ids
// "<id>#<ordinal>" where ordinal counts that subject's copies so far.
// Throws IndexOutOfRange.
TrajectoryDataset resample(const TrajectoryDataset& ds, std::span<const Eigen::Index> indices);

enum class CsvLayout { long_format, wide_format };

// Parses CSV text, detecting the layout from the header:
//   long: id,time,y
//   wide: id,y_<t1>,...,y_<tT>
TrajectoryDataset parse_csv(std::istream& in);
TrajectoryDataset read_csv(const std::filesystem::path& path);

void write_long_csv(std::ostream& out, const TrajectoryDataset& ds);
void write_wide_csv(std::ostream& out, const TrajectoryDataset& ds);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace lcga
