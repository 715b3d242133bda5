#include "rhc/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "rhc/errors.hpp"

namespace rhc {

std::string csv_header(int n, int p) {
    std::string h = "t";
    for (int i = 1; i <= n; ++i) h += ",x" + std::to_string(i);
    for (int i = 1; i <= n; ++i) h += ",y" + std::to_string(i);
    h += ",e_norm";
    for (int i = 1; i <= n; ++i) h += ",u" + std::to_string(i);
    for (int i = 1; i <= p; ++i) h += ",theta_hat_" + std::to_string(i);
    for (int i = 1; i <= p; ++i) h += ",theta_true_" + std::to_string(i);
    h += ",F_norm,J,pe";
    return h;
}

namespace {

class RowWriter {
public:
    explicit RowWriter(std::string& line) : line_(line) {}

    void value(double v) {
        if (!first_) line_ += ',';
        first_ = false;
        char buf[40];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
        line_.append(buf, res.ptr);
    }
    void values(const Vector& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) value(v(i));
    }

private:
    std::string& line_;
    bool first_ = true;
};

}  // namespace

void write_csv(const TrajectoryLog& log, std::ostream& out) {
    out << csv_header(log.n, log.p) << '\n';
    std::string line;
    for (const auto& row : log.rows) {
        line.clear();
        RowWriter w(line);
        w.value(row.t);
        w.values(row.x);
        w.values(row.y);
        w.value(row.e_norm);
        w.values(row.u);
        w.values(row.theta_hat);
        w.values(row.theta_true);
        w.value(row.F_norm);
        w.value(row.J);
        w.value(row.pe);
        line += '\n';
        out << line;
    }
}

void write_csv(const TrajectoryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path, "cannot open CSV output");
    write_csv(log, out);
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace rhc
