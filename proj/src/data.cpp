#include "lcga/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "lcga/error.hpp"

namespace lcga {

TrajectoryDataset::TrajectoryDataset(std::vector<std::string> subject_ids,
                                     Eigen::VectorXd times,
                                     Eigen::MatrixXd outcomes)
    : subject_ids_(std::move(subject_ids)), times_(std::move(times)), outcomes_(std::move(outcomes)) {
    if (outcomes_.rows() < 1) throw DataError("dataset needs at least one subject");
    if (times_.size() < 2) throw DataError("dataset needs at least two time points");
    if (outcomes_.cols() != times_.size())
        throw DataError("outcome matrix has " + std::to_string(outcomes_.cols()) + " columns but the grid has " +
                        std::to_string(times_.size()) + " times");
    if (static_cast<Eigen::Index>(subject_ids_.size()) != outcomes_.rows())
        throw DataError("subject id count does not match outcome rows");
    for (Eigen::Index t = 0; t < times_.size(); ++t) {
        if (!std::isfinite(times_[t])) throw NonNumeric("non-finite time value");
        if (t > 0 && !(times_[t] > times_[t - 1])) throw DataError("time grid must be strictly increasing");
    }
    if (!outcomes_.allFinite()) throw NonNumeric("outcomes must all be finite");
}

double TrajectoryDataset::outcome_variance() const {
    const double mean = outcomes_.mean();
    return (outcomes_.array() - mean).square().mean();
}

bool operator==(const TrajectoryDataset& a, const TrajectoryDataset& b) {
    return a.subject_ids_ == b.subject_ids_ && a.times_.size() == b.times_.size() && a.times_ == b.times_ &&
           a.outcomes_.rows() == b.outcomes_.rows() && a.outcomes_.cols() == b.outcomes_.cols() &&
           a.outcomes_ == b.outcomes_;
}

TrajectoryDataset load_long(std::span<const LongRow> rows) {
    if (rows.empty()) throw DataError("no data rows");

    auto where = [](const LongRow& r) {
        return r.line > 0 ? " (line " + std::to_string(r.line) + ")" : std::string{};
    };

    std::vector<std::string> ids;
    std::unordered_map<std::string, std::size_t> position;
    std::vector<std::map<double, std::pair<double, const LongRow*>>> cells;
    for (const auto& row : rows) {
        if (!std::isfinite(row.time) || !std::isfinite(row.value))
            throw NonNumeric("non-finite value for subject '" + row.id + "'" + where(row));
        auto [it, inserted] = position.try_emplace(row.id, ids.size());
        if (inserted) {
            ids.push_back(row.id);
            cells.emplace_back();
        }
        auto& subject = cells[it->second];
        if (!subject.try_emplace(row.time, row.value, &row).second)
            throw DuplicateCell("subject '" + row.id + "' has two values at time " + format_double(row.time) +
                                where(row));
    }

    // The grid is the union of all observed times; every subject must cover it.
    std::map<double, int> grid;
    for (const auto& subject : cells)
        for (const auto& [t, v] : subject) grid.emplace(t, 0);

    const auto n = static_cast<Eigen::Index>(ids.size());
    const auto T = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd times(T);
    {
        Eigen::Index t = 0;
        for (auto& [time, col] : grid) {
            times[t] = time;
            col = static_cast<int>(t++);
        }
    }
    Eigen::MatrixXd y(n, T);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& subject = cells[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(subject.size()) != T) {
            for (const auto& [time, col] : grid) {
                if (!subject.contains(time))
                    throw RaggedData("subject '" + ids[static_cast<std::size_t>(i)] + "' has no value at time " +
                                     format_double(time));
            }
        }
        for (const auto& [time, value] : subject) y(i, grid.at(time)) = value.first;
    }
    return TrajectoryDataset(std::move(ids), std::move(times), std::move(y));
}

TrajectoryDataset resample(const TrajectoryDataset& ds, std::span<const Eigen::Index> indices) {
    if (indices.empty()) throw IndexOutOfRange("resample needs at least one index");
    const Eigen::Index n = ds.n_subjects();
    std::vector<std::string> ids;
    ids.reserve(indices.size());
    std::vector<int> copies(static_cast<std::size_t>(n), 0);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(indices.size()), ds.n_times());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const Eigen::Index i = indices[r];
        if (i < 0 || i >= n)
            throw IndexOutOfRange("subject index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
        const int ordinal = ++copies[static_cast<std::size_t>(i)];
        ids.push_back(ds.subject_ids()[static_cast<std::size_t>(i)] + "#" + std::to_string(ordinal));
        y.row(static_cast<Eigen::Index>(r)) = ds.outcomes().row(i);
    }
    return TrajectoryDataset(std::move(ids), ds.times(), std::move(y));
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t line, std::string_view what) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = field.data() + field.size();
    if (!field.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw NonNumeric("line " + std::to_string(line) + ": " + std::string(what) + " '" + std::string(field) +
                         "' is not a finite number");
    return value;
}

}  // namespace

TrajectoryDataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, header_line)) {
        ++line_no;
        if (!trim(header_line).empty()) break;
    }
    if (trim(header_line).empty()) throw DataError("empty CSV input");
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) header_line.erase(0, 3);
    header = split_fields(header_line);
    if (header.size() < 2 || header[0] != "id")
        throw DataError("line " + std::to_string(line_no) + ": header must start with 'id'");

    const bool is_long = header.size() == 3 && header[1] == "time" && header[2] == "y";
    std::vector<double> wide_times;
    if (!is_long) {
        for (std::size_t c = 1; c < header.size(); ++c) {
            if (!header[c].starts_with("y_"))
                throw DataError("line " + std::to_string(line_no) + ": expected 'id,time,y' or 'id,y_<t>,...'; got column '" +
                                std::string(header[c]) + "'");
            wide_times.push_back(parse_number(header[c].substr(2), line_no, "header time"));
        }
    }

    std::vector<LongRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(fields.size()));
        if (fields[0].empty()) throw DataError("line " + std::to_string(line_no) + ": empty subject id");
        if (is_long) {
            rows.push_back({std::string(fields[0]), parse_number(fields[1], line_no, "time"),
                            parse_number(fields[2], line_no, "value"), line_no});
        } else {
            for (std::size_t c = 1; c < fields.size(); ++c)
                rows.push_back({std::string(fields[0]), wide_times[c - 1], parse_number(fields[c], line_no, "value"),
                                line_no});
        }
    }
    return load_long(rows);
}

TrajectoryDataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_csv(in);
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_long_csv(std::ostream& out, const TrajectoryDataset& ds) {
    out << "id,time,y\n";
    for (Eigen::Index i = 0; i < ds.n_subjects(); ++i)
        for (Eigen::Index t = 0; t < ds.n_times(); ++t)
            out << ds.subject_ids()[static_cast<std::size_t>(i)] << ',' << format_double(ds.times()[t]) << ','
                << format_double(ds.outcomes()(i, t)) << '\n';
}

void write_wide_csv(std::ostream& out, const TrajectoryDataset& ds) {
    out << "id";
    for (Eigen::Index t = 0; t < ds.n_times(); ++t) out << ",y_" << format_double(ds.times()[t]);
    out << '\n';
    for (Eigen::Index i = 0; i < ds.n_subjects(); ++i) {
        out << ds.subject_ids()[static_cast<std::size_t>(i)];
        for (Eigen::Index t = 0; t < ds.n_times(); ++t) out << ',' << format_double(ds.outcomes()(i, t));
        out << '\n';
    }
}

}  // namespace lcga
