#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dgdamage/benchmark.hpp"

namespace dgdamage {

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

inline std::string cell(double v) { return std::isnan(v) ? std::string() : sci(v); }

}  // namespace detail

/// Header `tau,h,err_phi,eoc_phi,err_d,eoc_d` (state tables) or
/// `tau,h,err_l,eoc_l` (control tables); scientific notation, EOC blank in
/// the first row, `not_conv` sentinel in the error cells of failed rows.
inline void emit_csv(const ConvergenceTable& table, std::ostream& os) {
    if (table.control)
        os << "tau,h,err_l,eoc_l\n";
    else
        os << "tau,h,err_phi,eoc_phi,err_d,eoc_d\n";
    for (const auto& row : table.rows) {
        os << detail::sci(row.tau) << ',' << detail::sci(row.h) << ',';
        if (table.control) {
            if (row.not_conv)
                os << "not_conv,";
            else
                os << detail::cell(row.err_l) << ',' << detail::cell(row.eoc_l);
            os << '\n';
        } else {
            if (row.not_conv)
                os << "not_conv,,not_conv,";
            else
                os << detail::cell(row.err_phi) << ',' << detail::cell(row.eoc_phi) << ','
                   << detail::cell(row.err_d) << ',' << detail::cell(row.eoc_d);
            os << '\n';
        }
    }
    if (!os) throw std::runtime_error("emit_csv: write failure");
}

inline void emit_csv(const ConvergenceTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    emit_csv(table, out);
    out.close();
    if (!out) throw std::runtime_error("emit_csv: write failure on " + path);
}

/// Human-readable rendering for terminal output.
inline void print_table(const ConvergenceTable& table, std::ostream& os) {
    os << "# " << table.label << " (" << table.fixed_desc << ")\n";
    if (table.control)
        os << "      tau            h          err_l      eoc_l\n";
    else
        os << "      tau            h        err_phi    eoc_phi      err_d      eoc_d\n";
    char buf[200];
    for (const auto& row : table.rows) {
        if (table.control) {
            if (row.not_conv)
                std::snprintf(buf, sizeof buf, "%13.6e %12.6e   not_conv", row.tau, row.h);
            else if (std::isnan(row.eoc_l))
                std::snprintf(buf, sizeof buf, "%13.6e %12.6e %12.4e       -", row.tau, row.h, row.err_l);
            else
                std::snprintf(buf, sizeof buf, "%13.6e %12.6e %12.4e %7.2f", row.tau, row.h, row.err_l,
                              row.eoc_l);
        } else {
            if (row.not_conv)
                std::snprintf(buf, sizeof buf, "%13.6e %12.6e   not_conv", row.tau, row.h);
            else if (std::isnan(row.eoc_phi))
                std::snprintf(buf, sizeof buf, "%13.6e %12.6e %12.4e       - %12.4e       -", row.tau,
                              row.h, row.err_phi, row.err_d);
            else
                std::snprintf(buf, sizeof buf, "%13.6e %12.6e %12.4e %7.2f %12.4e %7.2f", row.tau, row.h,
                              row.err_phi, row.eoc_phi, row.err_d, row.eoc_d);
        }
        os << buf << '\n';
    }
}

}  // namespace dgdamage
