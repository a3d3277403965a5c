// Copyright 2026 The TRAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trap/opf_case.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include "trap/errors.hpp"

namespace trap {
namespace {

struct Row {
  int line;
  std::vector<double> values;
};

struct Section {
  int line = 0;
  std::vector<Row> rows;
};

std::string strip_comment(const std::string& s) {
  const auto pos = s.find('%');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

double to_number(const std::string& token, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "malformed number '" + token + "'");
  }
}

// Splits the file into scalar assignments and matrix sections.
void scan(const std::string& text, std::map<std::string, std::pair<int, double>>& scalars,
          std::map<std::string, Section>& sections) {
  static const std::regex open_re(R"(^\s*mpc\.(\w+)\s*=\s*\[(.*)$)");
  static const std::regex scalar_re(R"(^\s*mpc\.(\w+)\s*=\s*([^\[;]+);?\s*$)");
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  Section* current = nullptr;
  std::string current_name;
  Row pending;
  auto flush_tokens = [&](const std::string& body, int at) {
    std::string chunk;
    std::istringstream parts(body);
    std::string piece;
    // Rows end at ';' or at the end of the text line.
    size_t start = 0;
    while (start <= body.size()) {
      const size_t semi = body.find(';', start);
      const std::string seg = body.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
      std::istringstream tokens(seg);
      std::string tok;
      while (tokens >> tok) {
        if (tok == ",") continue;
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (pending.values.empty()) pending.line = at;
        pending.values.push_back(to_number(tok, at));
      }
      if (semi == std::string::npos) break;
      if (!pending.values.empty()) current->rows.push_back(pending);
      pending = Row{};
      start = semi + 1;
    }
    if (!pending.values.empty()) {
      current->rows.push_back(pending);
      pending = Row{};
    }
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_comment(raw);
    if (current) {
      const auto close = s.find(']');
      if (close == std::string::npos) {
        flush_tokens(s, line);
      } else {
        flush_tokens(s.substr(0, close), line);
        current = nullptr;
      }
      continue;
    }
    std::smatch m;
    if (std::regex_match(s, m, open_re)) {
      current_name = m[1];
      if (sections.count(current_name)) throw ParseError(line, "duplicate section mpc." + current_name);
      current = &sections[current_name];
      current->line = line;
      std::string rest = m[2];
      const auto close = rest.find(']');
      if (close == std::string::npos) {
        flush_tokens(rest, line);
      } else {
        flush_tokens(rest.substr(0, close), line);
        current = nullptr;
      }
    } else if (std::regex_match(s, m, scalar_re)) {
      std::string value = m[2];
      value.erase(value.find_last_not_of(" \t\r") + 1);
      if (m[1] == "baseMVA") scalars[m[1]] = {line, to_number(value, line)};
    }
  }
  if (current) throw ParseError(current->line, "section mpc." + current_name + " is not closed");
}

const Section& require(const std::map<std::string, Section>& sections, const std::string& name) {
  auto it = sections.find(name);
  if (it == sections.end()) throw ParseError(0, "missing section mpc." + name);
  return it->second;
}

void need_columns(const Row& row, size_t n, const std::string& what) {
  if (row.values.size() < n) {
    throw ParseError(row.line, what + " row has " + std::to_string(row.values.size()) +
                                   " columns, expected at least " + std::to_string(n));
  }
}

bool connected(const NetworkCase& c) {
  const int n = static_cast<int>(c.buses.size());
  if (n == 0) return true;
  std::vector<std::vector<int>> adj(n);
  for (const auto& br : c.branches) {
    adj[br.from].push_back(br.to);
    adj[br.to].push_back(br.from);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

}  // namespace

NetworkCase parse_case(const std::string& text) {
  std::map<std::string, std::pair<int, double>> scalars;
  std::map<std::string, Section> sections;
  scan(text, scalars, sections);

  NetworkCase c;
  auto base = scalars.find("baseMVA");
  if (base == scalars.end()) throw ParseError(0, "missing mpc.baseMVA");
  c.base_mva = base->second.second;
  if (!(c.base_mva > 0.0)) throw ParseError(base->second.first, "baseMVA must be positive");
  const double s = c.base_mva;

  const Section& bus_sec = require(sections, "bus");
  int reference = -1;
  for (const auto& row : bus_sec.rows) {
    need_columns(row, 13, "bus");
    const auto& v = row.values;
    Bus b;
    b.id = static_cast<int>(v[0]);
    if (b.id != v[0] || b.id <= 0) throw ParseError(row.line, "bus id must be a positive integer");
    if (c.bus_index.count(b.id)) throw ParseError(row.line, "duplicate bus " + std::to_string(b.id));
    b.type = static_cast<int>(v[1]);
    b.pd = v[2] / s;
    b.qd = v[3] / s;
    b.gs = v[4] / s;
    b.bs = v[5] / s;
    b.vmax = v[11];
    b.vmin = v[12];
    b.line = row.line;
    if (!(b.vmin > 0.0 && b.vmin <= b.vmax)) {
      throw ParseError(row.line, "bus " + std::to_string(b.id) + " needs 0 < Vmin <= Vmax");
    }
    if (b.type == 4) continue;
    c.bus_index[b.id] = static_cast<int>(c.buses.size());
    if (b.type == 3 && reference < 0) reference = static_cast<int>(c.buses.size());
    c.buses.push_back(b);
  }
  if (c.buses.empty()) throw ParseError(bus_sec.line, "no buses");

  auto lookup = [&](double id, int line, const std::string& what) {
    auto it = c.bus_index.find(static_cast<int>(id));
    if (it == c.bus_index.end() || static_cast<int>(id) != id) {
      std::ostringstream msg;
      msg << what << " references unknown bus " << id;
      throw ParseError(line, msg.str());
    }
    return it->second;
  };

  const Section& gen_sec = require(sections, "gen");
  std::vector<int> gen_rows;  // row position of each in-service generator
  for (size_t k = 0; k < gen_sec.rows.size(); ++k) {
    const auto& row = gen_sec.rows[k];
    need_columns(row, 10, "gen");
    const auto& v = row.values;
    Generator g;
    g.bus = lookup(v[0], row.line, "generator");
    g.qmax = v[3] / s;
    g.qmin = v[4] / s;
    g.pmax = v[8] / s;
    g.pmin = v[9] / s;
    g.line = row.line;
    if (g.pmin > g.pmax || g.qmin > g.qmax) throw ParseError(row.line, "generator bounds are inverted");
    if (v[7] <= 0) continue;
    gen_rows.push_back(static_cast<int>(k));
    c.gens.push_back(g);
  }

  const Section& cost_sec = require(sections, "gencost");
  if (cost_sec.rows.size() < gen_sec.rows.size()) {
    throw ParseError(cost_sec.line, "gencost has fewer rows than gen");
  }
  for (size_t k = 0; k < c.gens.size(); ++k) {
    const auto& row = cost_sec.rows[gen_rows[k]];
    need_columns(row, 4, "gencost");
    const auto& v = row.values;
    if (v[0] != 2) throw ParseError(row.line, "only polynomial cost (model 2) is supported");
    const int ncoef = static_cast<int>(v[3]);
    if (ncoef < 1 || ncoef > 3) throw ParseError(row.line, "polynomial cost must have 1 to 3 coefficients");
    need_columns(row, 4 + ncoef, "gencost");
    double coef[3] = {0.0, 0.0, 0.0};  // c2, c1, c0
    for (int q = 0; q < ncoef; ++q) coef[3 - ncoef + q] = v[4 + q];
    c.gens[k].c2 = coef[0];
    c.gens[k].c1 = coef[1];
    c.gens[k].c0 = coef[2];
  }

  const Section& br_sec = require(sections, "branch");
  for (const auto& row : br_sec.rows) {
    need_columns(row, 11, "branch");
    const auto& v = row.values;
    Branch br;
    br.from = lookup(v[0], row.line, "branch");
    br.to = lookup(v[1], row.line, "branch");
    if (br.from == br.to) throw ParseError(row.line, "branch connects a bus to itself");
    br.r = v[2];
    br.x = v[3];
    br.b = v[4];
    br.rate = v[5] / s;
    br.line = row.line;
    if (v[10] <= 0) continue;
    if ((v[8] != 0.0 && v[8] != 1.0) || v[9] != 0.0) {
      throw ParseError(row.line, "off-nominal tap ratios and phase shifters are not supported");
    }
    const double den = br.r * br.r + br.x * br.x;
    if (den == 0.0) throw ParseError(row.line, "branch has zero impedance");
    br.g = br.r / den;
    br.bser = -br.x / den;
    if (br.rate < 0.0) throw ParseError(row.line, "negative rateA");
    c.branches.push_back(br);
  }

  c.reference = reference >= 0 ? reference : (c.gens.empty() ? 0 : c.gens.front().bus);
  if (!connected(c)) throw ParseError(0, "network is not connected");
  return c;
}

NetworkCase parse_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open case file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str());
}

}  // namespace trap
