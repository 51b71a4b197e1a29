// Copyright 2026 The ltqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <sstream>

#include "ltqkd/cli.hpp"

namespace ltqkd::cli {

namespace {

constexpr std::string_view kYieldHeader = "label,basis,outcome,probability,prior";
constexpr std::string_view kTrialHeader = "label,basis,outcome,count,prior,basis_prob";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

struct Row {
    int line = 0;
    std::vector<std::string_view> fields;
};

[[noreturn]] void bad(int line, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ": " + what);
}

// Splits text into trimmed comma-separated rows, skipping blank lines and
// '#' comments. The first data row must equal header.
std::vector<Row> read_rows(std::string_view text, std::string_view header, std::vector<std::string_view>* comments) {
    std::vector<Row> rows;
    bool seen_header = false;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (comments) comments->push_back(line.substr(1));
            continue;
        }
        if (!seen_header) {
            std::string compact;
            for (char c : line) {
                if (c != ' ' && c != '\t') compact.push_back(c);
            }
            if (compact != header) bad(line_no, "expected header '" + std::string(header) + "'");
            seen_header = true;
            continue;
        }
        Row row{line_no, {}};
        std::size_t f = 0;
        while (true) {
            const auto comma = line.find(',', f);
            row.fields.push_back(trim(line.substr(f, comma == std::string_view::npos ? comma : comma - f)));
            if (comma == std::string_view::npos) break;
            f = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (!seen_header) throw ValidationError("missing header '" + std::string(header) + "'");
    return rows;
}

double number(const Row& row, std::size_t i, const char* name) {
    const auto s = row.fields[i];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        bad(row.line, std::string(name) + ": expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

std::uint64_t integer(std::string_view s, int line, const char* name) {
    s = trim(s);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        bad(line, std::string(name) + ": expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
}

Basis basis_field(const Row& row, std::size_t i) {
    try {
        return parse_basis(row.fields[i]);
    } catch (const ValidationError& e) {
        bad(row.line, e.what());
    }
}

void expect_fields(const Row& row, std::size_t n) {
    if (row.fields.size() != n) {
        bad(row.line, "expected " + std::to_string(n) + " fields, got " + std::to_string(row.fields.size()));
    }
}

}  // namespace

std::map<Basis, YieldTable> parse_yield_csv(std::string_view text) {
    std::map<Basis, YieldTable> tables;
    for (const Row& row : read_rows(text, kYieldHeader, nullptr)) {
        expect_fields(row, 5);
        const std::string label(row.fields[0]);
        if (label.empty()) bad(row.line, "empty label");
        const Basis b = basis_field(row, 1);
        const auto outcome = integer(row.fields[2], row.line, "outcome");
        if (outcome > 1) bad(row.line, "outcome must be 0 or 1");
        const double prob = number(row, 3, "probability");
        const double prior = number(row, 4, "prior");
        if (!(prior > 0.0) || prior > 1.0) bad(row.line, "prior must be in (0, 1]");

        auto it = tables.try_emplace(b, YieldTable(b)).first;
        YieldTable& t = it->second;
        if (t.has_prior(label) && t.prior(label) != prior) bad(row.line, "inconsistent prior for " + label);
        if (t.has(label, static_cast<int>(outcome))) bad(row.line, "duplicate row for " + label);
        t.set_prior(label, prior);
        t.set_joint(label, static_cast<int>(outcome), prob);
    }
    for (const auto& [b, t] : tables) t.validate();
    return tables;
}

std::string yield_csv(const std::map<Basis, YieldTable>& tables) {
    std::ostringstream out;
    out << kYieldHeader << '\n';
    for (const auto& [b, t] : tables) {
        for (const auto& label : t.labels()) {
            for (int s = 0; s < 2; ++s) {
                if (!t.has(label, s)) continue;
                out << label << ',' << basis_name(b) << ',' << s << ',' << format_double(t.joint(label, s)) << ','
                    << format_double(t.prior(label)) << '\n';
            }
        }
    }
    return out.str();
}

bool is_trial_csv(std::string_view text) {
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty() || line.front() == '#') continue;
        std::string compact;
        for (char c : line) {
            if (c != ' ' && c != '\t') compact.push_back(c);
        }
        return compact == kTrialHeader;
    }
    return false;
}

mc::TrialRecord parse_trial_csv(std::string_view text) {
    std::vector<std::string_view> comments;
    const auto rows = read_rows(text, kTrialHeader, &comments);
    mc::TrialRecord t;
    bool have_n = false;
    for (auto c : comments) {
        c = trim(c);
        const auto eq = c.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = trim(c.substr(0, eq));
        const auto value = c.substr(eq + 1);
        if (key == "seed") t.seed = integer(value, 0, "seed");
        if (key == "n_pulses") {
            t.n_pulses = integer(value, 0, "n_pulses");
            have_n = true;
        }
    }
    std::uint64_t total = 0;
    for (const Row& row : rows) {
        expect_fields(row, 6);
        const std::string label(row.fields[0]);
        if (label.empty()) bad(row.line, "empty label");
        const Basis b = basis_field(row, 1);
        const auto outcome = integer(row.fields[2], row.line, "outcome");
        if (outcome > static_cast<std::uint64_t>(mc::kInconclusive)) bad(row.line, "outcome must be 0, 1 or 2");
        const auto n = integer(row.fields[3], row.line, "count");
        const double prior = number(row, 4, "prior");
        const double pb = number(row, 5, "basis_prob");
        if (!(prior > 0.0) || prior > 1.0) bad(row.line, "prior must be in (0, 1]");
        if (!(pb > 0.0) || pb > 1.0) bad(row.line, "basis_prob must be in (0, 1]");

        auto [pit, fresh_prior] = t.priors.try_emplace(label, prior);
        if (!fresh_prior && pit->second != prior) bad(row.line, "inconsistent prior for " + label);
        auto [bit, fresh_basis] = t.basis_probs.try_emplace(b, pb);
        if (!fresh_basis && bit->second != pb) bad(row.line, "inconsistent basis_prob");
        auto [cit, fresh] = t.counts.try_emplace({label, b, static_cast<int>(outcome)}, n);
        if (!fresh) bad(row.line, "duplicate row for " + label);
        total += n;
    }
    if (!have_n) t.n_pulses = total;
    if (t.n_pulses == 0) throw ValidationError("trial has no pulses");
    if (total > t.n_pulses) throw ValidationError("counts exceed n_pulses");
    return t;
}

std::string trial_csv(const mc::TrialRecord& t) {
    std::ostringstream out;
    out << "# seed=" << t.seed << '\n';
    out << "# n_pulses=" << t.n_pulses << '\n';
    out << kTrialHeader << '\n';
    for (const auto& [key, n] : t.counts) {
        const auto& [label, b, outcome] = key;
        out << label << ',' << basis_name(b) << ',' << outcome << ',' << n << ',' << format_double(t.priors.at(label))
            << ',' << format_double(t.basis_probs.at(b)) << '\n';
    }
    return out.str();
}

MdiYieldTable parse_mdi_csv(std::string_view text, double gamma) {
    MdiYieldTable table;
    for (const Row& row : read_rows(text, kYieldHeader, nullptr)) {
        expect_fields(row, 5);
        const auto label = row.fields[0];
        const auto slash = label.find('/');
        if (slash == std::string_view::npos || slash == 0 || slash + 1 == label.size()) {
            bad(row.line, "mdi label must be ALICE/BOB");
        }
        if (row.fields[1] != "bell") bad(row.line, "mdi basis must be 'bell'");
        if (row.fields[2] != "phi+") bad(row.line, "mdi outcome must be 'phi+'");
        const std::string a(label.substr(0, slash));
        const std::string b(label.substr(slash + 1));
        const double prob = number(row, 3, "probability");
        const double prior = row.fields[4].empty() ? mdi_pair_weight(a, b, gamma) : number(row, 4, "prior");
        if (prob < 0.0 || prob > 1.0) bad(row.line, "probability must be in [0, 1]");
        if (!(prior > 0.0) || prior > 1.0) bad(row.line, "prior must be in (0, 1]");
        if (prob > prior) bad(row.line, "probability exceeds prior");
        if (table.has(a, b)) bad(row.line, "duplicate row for " + std::string(label));
        table.set(a, b, prob, prior);
    }
    return table;
}

}  // namespace ltqkd::cli
