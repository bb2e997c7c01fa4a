// SPDX-License-Identifier: Apache-2.0
//
// fdacov: near-field FDA covert-region simulation and optimization
// Copyright (C) 2026 The fdacov authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef FDACOV_CSV_HPP
#define FDACOV_CSV_HPP

#include "config.hpp"
#include "fieldmap.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace fdacov {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> metadata; // emitted as "# " lines before the header
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Writes to a sibling temporary and renames it into place, so a failed run
// never leaves a truncated file behind.
inline void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw OutputError("cannot open " + tmp.string() + " for writing");
        try {
            body(out);
        } catch (...) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw OutputError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw OutputError("cannot move " + tmp.string() + " to " + path.string());
    }
}

inline void write_metadata(std::ostream& out, const std::vector<std::string>& metadata)
{
    for (const auto& m : metadata)
        out << "# " << m << '\n';
}

inline void emit_csv(std::ostream& out, const CsvTable& t)
{
    write_metadata(out, t.metadata);
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out << (i ? "," : "") << t.header[i];
    out << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size())
            throw OutputError("csv: row width " + std::to_string(row.size()) + " does not match header width " +
                              std::to_string(t.header.size()));
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

inline void emit_csv(const std::filesystem::path& path, const CsvTable& t)
{
    write_atomic(path, [&](std::ostream& out) { emit_csv(out, t); });
}

// Columns x_m,y_m,normalized_power, y outer. Invalid cells carry "nan".
inline void emit_field_csv(std::ostream& out, const FieldMap& map, const std::vector<std::string>& metadata)
{
    write_metadata(out, metadata);
    out << "x_m,y_m,normalized_power\n";
    std::string line;
    for (std::size_t j = 0; j < map.ny; ++j) {
        const std::string y = format_double(map.spec.y(j));
        for (std::size_t i = 0; i < map.nx; ++i) {
            line.clear();
            line += format_double(map.spec.x(i));
            line += ',';
            line += y;
            line += ',';
            line += format_double(map.values[map.index(i, j)]);
            line += '\n';
            out << line;
        }
    }
}

// Columns x_m,y_m,noncovert (0/1), y outer.
inline void emit_mask_csv(std::ostream& out, const FieldMap& map, const NoncovertRegion& region,
                          const std::vector<std::string>& metadata)
{
    write_metadata(out, metadata);
    out << "x_m,y_m,noncovert\n";
    for (std::size_t j = 0; j < map.ny; ++j) {
        const std::string y = format_double(map.spec.y(j));
        for (std::size_t i = 0; i < map.nx; ++i)
            out << format_double(map.spec.x(i)) << ',' << y << ',' << int(region.mask[map.index(i, j)]) << '\n';
    }
}

struct FieldCsv {
    std::vector<std::string> metadata;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> value;
};

inline FieldCsv read_field_csv(std::istream& in)
{
    FieldCsv out;
    std::string line;
    bool header_seen = false;
    auto parse = [](std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw OutputError("field csv: bad number '" + std::string(s) + "'");
        return v;
    };
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            out.metadata.push_back(line.substr(2));
            continue;
        }
        if (!header_seen) {
            if (line != "x_m,y_m,normalized_power")
                throw OutputError("field csv: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw OutputError("field csv: malformed row '" + line + "'");
        const std::string_view v(line);
        out.x.push_back(parse(v.substr(0, c1)));
        out.y.push_back(parse(v.substr(c1 + 1, c2 - c1 - 1)));
        out.value.push_back(parse(v.substr(c2 + 1)));
    }
    if (!header_seen)
        throw OutputError("field csv: missing header");
    return out;
}

} // namespace fdacov

#endif
