#include "miblp/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace miblp {

namespace {

constexpr double kNoBound = std::numeric_limits<double>::infinity();

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw IoError(where + ": expected a number, got '" + tok + "'");
  }
  if (used != tok.size()) throw IoError(where + ": expected a number, got '" + tok + "'");
  return v;
}

// Everything read out of the MPS file before level assignment.
struct MpsData {
  std::vector<std::string> row_names;  // constraint rows in file order
  std::vector<RowSense> row_sense;
  std::map<std::string, int> row_index;
  std::string objective_row;

  std::vector<std::string> col_names;  // columns in order of first appearance
  std::map<std::string, int> col_index;
  std::vector<char> col_integer;
  std::vector<double> col_lower, col_upper;
  std::vector<char> lower_set, upper_set;

  std::vector<double> objective;              // per column
  std::map<std::pair<int, int>, double> coef;  // (row, col)
  std::vector<double> rhs;
  std::vector<char> rhs_set;
  std::vector<double> range;
  std::vector<char> range_set;

  int col(const std::string& name, const std::string& where) const {
    auto it = col_index.find(name);
    if (it == col_index.end()) throw IoError(where + ": unknown column '" + name + "'");
    return it->second;
  }
};

MpsData read_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open MPS file '" + path + "'");

  MpsData mps;
  enum class Section { none, name, rows, columns, rhs, ranges, bounds, done };
  Section section = Section::none;
  bool integer_block = false;
  std::string line;
  int lineno = 0;

  auto where = [&] { return path + ":" + std::to_string(lineno); };

  auto row_of = [&](const std::string& name) {
    if (name == mps.objective_row) return -1;
    auto it = mps.row_index.find(name);
    if (it == mps.row_index.end()) throw IoError(where() + ": unknown row '" + name + "'");
    return it->second;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;

    // Section headers start in the first column; data lines are indented.
    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = tok[0];
      if (head == "NAME")
        section = Section::name;
      else if (head == "ROWS")
        section = Section::rows;
      else if (head == "COLUMNS")
        section = Section::columns;
      else if (head == "RHS")
        section = Section::rhs;
      else if (head == "RANGES")
        section = Section::ranges;
      else if (head == "BOUNDS")
        section = Section::bounds;
      else if (head == "ENDATA") {
        section = Section::done;
        break;
      } else
        throw IoError(where() + ": unsupported section '" + head + "'");
      continue;
    }

    switch (section) {
      case Section::rows: {
        if (tok.size() != 2) throw IoError(where() + ": ROWS lines read '<type> <name>'");
        const std::string& type = tok[0];
        const std::string& name = tok[1];
        if (mps.row_index.count(name) || name == mps.objective_row)
          throw IoError(where() + ": duplicate row '" + name + "'");
        if (type == "N") {
          if (!mps.objective_row.empty())
            throw IoError(where() + ": a second N row; only one objective row is supported");
          mps.objective_row = name;
        } else if (type == "G" || type == "L" || type == "E") {
          mps.row_index[name] = static_cast<int>(mps.row_names.size());
          mps.row_names.push_back(name);
          mps.row_sense.push_back(type == "G"   ? RowSense::ge
                                  : type == "L" ? RowSense::le
                                                : RowSense::eq);
        } else {
          throw IoError(where() + ": unknown row type '" + type + "'");
        }
        break;
      }
      case Section::columns: {
        bool marker = std::any_of(tok.begin(), tok.end(),
                                  [](const std::string& t) { return t == "'MARKER'"; });
        if (marker) {
          for (const std::string& t : tok) {
            if (t == "'INTORG'") integer_block = true;
            if (t == "'INTEND'") integer_block = false;
          }
          break;
        }
        if (tok.size() != 3 && tok.size() != 5)
          throw IoError(where() + ": COLUMNS lines read '<col> <row> <value> [<row> <value>]'");
        const std::string& cname = tok[0];
        if (!mps.col_index.count(cname)) {
          mps.col_index[cname] = static_cast<int>(mps.col_names.size());
          mps.col_names.push_back(cname);
          mps.col_integer.push_back(integer_block ? 1 : 0);
        }
        int c = mps.col_index[cname];
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          int r = row_of(tok[k]);
          double v = parse_number(tok[k + 1], where());
          if (r < 0) {
            mps.objective.resize(mps.col_names.size(), 0.0);
            mps.objective[c] += v;
          } else {
            mps.coef[{r, c}] += v;
          }
        }
        break;
      }
      case Section::rhs: {
        if (tok.size() != 3 && tok.size() != 5)
          throw IoError(where() + ": RHS lines read '<set> <row> <value> [<row> <value>]'");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          int r = row_of(tok[k]);
          if (r < 0)
            throw IoError(where() + ": objective-row RHS (constant terms) is not supported");
          mps.rhs.resize(mps.row_names.size(), 0.0);
          mps.rhs_set.resize(mps.row_names.size(), 0);
          mps.rhs[r] = parse_number(tok[k + 1], where());
          mps.rhs_set[r] = 1;
        }
        break;
      }
      case Section::ranges: {
        if (tok.size() != 3 && tok.size() != 5)
          throw IoError(where() + ": RANGES lines read '<set> <row> <value> [<row> <value>]'");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          int r = row_of(tok[k]);
          if (r < 0) throw IoError(where() + ": a range on the objective row");
          mps.range.resize(mps.row_names.size(), 0.0);
          mps.range_set.resize(mps.row_names.size(), 0);
          mps.range[r] = parse_number(tok[k + 1], where());
          mps.range_set[r] = 1;
        }
        break;
      }
      case Section::bounds: {
        if (tok.size() != 3 && tok.size() != 4)
          throw IoError(where() + ": BOUNDS lines read '<type> <set> <col> [<value>]'");
        const std::string& type = tok[0];
        int c = mps.col(tok[2], where());
        mps.col_lower.resize(mps.col_names.size(), 0.0);
        mps.col_upper.resize(mps.col_names.size(), kNoBound);
        mps.lower_set.resize(mps.col_names.size(), 0);
        mps.upper_set.resize(mps.col_names.size(), 0);
        auto value = [&] {
          if (tok.size() != 4) throw IoError(where() + ": bound type " + type + " needs a value");
          return parse_number(tok[3], where());
        };
        if (type == "UP") {
          mps.col_upper[c] = value();
          mps.upper_set[c] = 1;
        } else if (type == "LO") {
          mps.col_lower[c] = value();
          mps.lower_set[c] = 1;
        } else if (type == "FX") {
          mps.col_lower[c] = mps.col_upper[c] = value();
          mps.lower_set[c] = mps.upper_set[c] = 1;
        } else if (type == "BV") {
          mps.col_lower[c] = 0.0;
          mps.col_upper[c] = 1.0;
          mps.lower_set[c] = mps.upper_set[c] = 1;
          mps.col_integer[c] = 1;
        } else if (type == "UI") {
          mps.col_upper[c] = value();
          mps.upper_set[c] = 1;
          mps.col_integer[c] = 1;
        } else if (type == "LI") {
          mps.col_lower[c] = value();
          mps.lower_set[c] = 1;
          mps.col_integer[c] = 1;
        } else if (type == "MI") {
          mps.col_lower[c] = -kNoBound;
          mps.lower_set[c] = 1;
        } else if (type == "PL" || type == "FR") {
          mps.col_upper[c] = kNoBound;
          mps.upper_set[c] = 1;
          if (type == "FR") {
            mps.col_lower[c] = -kNoBound;
            mps.lower_set[c] = 1;
          }
        } else {
          throw IoError(where() + ": unknown bound type '" + type + "'");
        }
        break;
      }
      case Section::name:
      case Section::none:
      case Section::done:
        break;
    }
  }
  if (section != Section::done) throw IoError(path + ": missing ENDATA");
  if (mps.objective_row.empty()) throw IoError(path + ": no N row in ROWS");

  std::size_t nc = mps.col_names.size();
  mps.objective.resize(nc, 0.0);
  mps.col_lower.resize(nc, 0.0);
  mps.col_upper.resize(nc, kNoBound);
  mps.lower_set.resize(nc, 0);
  mps.upper_set.resize(nc, 0);
  std::size_t nr = mps.row_names.size();
  mps.rhs.resize(nr, 0.0);
  mps.rhs_set.resize(nr, 0);
  mps.range.resize(nr, 0.0);
  mps.range_set.resize(nr, 0);

  for (std::size_t c = 0; c < nc; ++c) {
    if (!std::isfinite(mps.col_upper[c]))
      throw IoError(path + ": column '" + mps.col_names[c] +
                    "' has no finite upper bound; every variable needs one in the BOUNDS section");
    if (!std::isfinite(mps.col_lower[c]))
      throw IoError(path + ": column '" + mps.col_names[c] +
                    "' has no finite lower bound; every variable needs one in the BOUNDS section");
  }
  return mps;
}

struct AuxData {
  int n2 = -1;
  int m2 = -1;
  std::vector<int> lc, lr;
  std::vector<double> lo;
  int os = 1;
  bool os_seen = false;
};

AuxData read_aux(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open aux file '" + path + "'");
  AuxData aux;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tok = tokenize(line);
    if (tok.empty() || tok[0][0] == '#' || tok[0][0] == '*') continue;
    std::string where = path + ":" + std::to_string(lineno);
    if (tok.size() != 2) throw IoError(where + ": aux lines read '<key> <value>'");
    const std::string& key = tok[0];
    if (key == "N")
      aux.n2 = static_cast<int>(parse_number(tok[1], where));
    else if (key == "M")
      aux.m2 = static_cast<int>(parse_number(tok[1], where));
    else if (key == "LC")
      aux.lc.push_back(static_cast<int>(parse_number(tok[1], where)));
    else if (key == "LR")
      aux.lr.push_back(static_cast<int>(parse_number(tok[1], where)));
    else if (key == "LO")
      aux.lo.push_back(parse_number(tok[1], where));
    else if (key == "OS") {
      aux.os = static_cast<int>(parse_number(tok[1], where));
      aux.os_seen = true;
      if (aux.os != 1 && aux.os != -1) throw IoError(where + ": OS must be 1 or -1");
    } else
      throw IoError(where + ": unknown aux key '" + key + "'");
  }
  if (aux.n2 < 0) throw IoError(path + ": missing N line");
  if (aux.m2 < 0) throw IoError(path + ": missing M line");
  if (static_cast<int>(aux.lc.size()) != aux.n2)
    throw IoError(path + ": N says " + std::to_string(aux.n2) + " second-level columns but " +
                  std::to_string(aux.lc.size()) + " LC lines given");
  if (static_cast<int>(aux.lr.size()) != aux.m2)
    throw IoError(path + ": M says " + std::to_string(aux.m2) + " second-level rows but " +
                  std::to_string(aux.lr.size()) + " LR lines given");
  if (aux.lo.size() != aux.lc.size())
    throw IoError(path + ": " + std::to_string(aux.lo.size()) + " LO lines for " +
                  std::to_string(aux.lc.size()) + " LC columns");
  return aux;
}

void append_row(Mat& a, Mat& g, const std::vector<double>& arow, const std::vector<double>& grow) {
  Mat na(a.rows + 1, a.cols), ng(g.rows + 1, g.cols);
  std::copy(a.a.begin(), a.a.end(), na.a.begin());
  std::copy(g.a.begin(), g.a.end(), ng.a.begin());
  for (int j = 0; j < a.cols; ++j) na(a.rows, j) = arow[j];
  for (int j = 0; j < g.cols; ++j) ng(g.rows, j) = grow[j];
  a = std::move(na);
  g = std::move(ng);
}

// Stable integer-first permutation of a list of column ids.
std::vector<int> integers_first(const std::vector<int>& ids, const std::vector<char>& is_int) {
  std::vector<int> out;
  for (int id : ids)
    if (is_int[id]) out.push_back(id);
  for (int id : ids)
    if (!is_int[id]) out.push_back(id);
  return out;
}

}  // namespace

MiblpInstance parse_mps_aux(const std::string& mps_path, const std::string& aux_path,
                            bool one_based, std::vector<std::string>* warnings) {
  MpsData mps = read_mps(mps_path);
  AuxData aux = read_aux(aux_path);
  if (!aux.os_seen && warnings)
    warnings->push_back(aux_path + ": no OS line, assuming the follower minimizes");

  int ncols = static_cast<int>(mps.col_names.size());
  int nrows = static_cast<int>(mps.row_names.size());
  int shift = one_based ? 1 : 0;

  std::vector<char> col_is_second(ncols, 0);
  std::vector<int> y_ids;
  for (int raw_id : aux.lc) {
    int id = raw_id - shift;
    if (id < 0 || id >= ncols)
      throw IoError(aux_path + ": LC index " + std::to_string(raw_id) + " out of range (" +
                    std::to_string(ncols) + " columns)");
    if (col_is_second[id]) throw IoError(aux_path + ": duplicate LC index " + std::to_string(raw_id));
    col_is_second[id] = 1;
    y_ids.push_back(id);
  }
  std::vector<char> row_is_second(nrows, 0);
  for (int raw_id : aux.lr) {
    int id = raw_id - shift;
    if (id < 0 || id >= nrows)
      throw IoError(aux_path + ": LR index " + std::to_string(raw_id) + " out of range (" +
                    std::to_string(nrows) + " rows)");
    if (row_is_second[id]) throw IoError(aux_path + ": duplicate LR index " + std::to_string(raw_id));
    row_is_second[id] = 1;
  }

  // Column order: x then y, integers first on each side. The follower
  // objective is given in LC order and follows the y permutation.
  std::vector<int> x_ids;
  for (int c = 0; c < ncols; ++c)
    if (!col_is_second[c]) x_ids.push_back(c);
  std::vector<double> lo_by_col(ncols, 0.0);
  for (std::size_t k = 0; k < y_ids.size(); ++k) lo_by_col[y_ids[k]] = aux.lo[k];
  x_ids = integers_first(x_ids, mps.col_integer);
  y_ids = integers_first(y_ids, mps.col_integer);

  RawInstance raw;
  raw.n1 = static_cast<int>(x_ids.size());
  raw.n2 = static_cast<int>(y_ids.size());
  for (int id : x_ids) raw.r1 += mps.col_integer[id] ? 1 : 0;
  for (int id : y_ids) raw.r2 += mps.col_integer[id] ? 1 : 0;
  raw.follower_maximize = aux.os == -1;
  for (int id : x_ids) {
    raw.c.push_back(mps.objective[id]);
    raw.lx.push_back(mps.col_lower[id]);
    raw.ux.push_back(mps.col_upper[id]);
  }
  for (int id : y_ids) {
    raw.d1.push_back(mps.objective[id]);
    raw.d2.push_back(lo_by_col[id]);
    raw.ly.push_back(mps.col_lower[id]);
    raw.uy.push_back(mps.col_upper[id]);
  }

  // One pass per level, keeping file order; a ranged row contributes its
  // second side as an extra row appended after the plain ones.
  for (int level = 1; level <= 2; ++level) {
    Mat a(0, raw.n1), g(0, raw.n2);
    std::vector<double> b;
    std::vector<RowSense> s;
    struct ExtraRow {
      std::vector<double> arow, grow;
      double rhs;
    };
    std::vector<ExtraRow> extra;  // second sides of ranged rows, appended last

    for (int r = 0; r < nrows; ++r) {
      if ((level == 2) != (row_is_second[r] != 0)) continue;
      std::vector<double> arow(raw.n1, 0.0), grow(raw.n2, 0.0);
      for (int j = 0; j < raw.n1; ++j) {
        auto it = mps.coef.find({r, x_ids[j]});
        if (it != mps.coef.end()) arow[j] = it->second;
      }
      for (int j = 0; j < raw.n2; ++j) {
        auto it = mps.coef.find({r, y_ids[j]});
        if (it != mps.coef.end()) grow[j] = it->second;
      }
      double rhs = mps.rhs[r];
      RowSense sense = mps.row_sense[r];
      if (mps.range_set[r]) {
        // A range turns the row into the interval [lo_lim, hi_lim].
        double rg = mps.range[r];
        double lo_lim = 0.0, hi_lim = 0.0;
        switch (sense) {
          case RowSense::ge:
            lo_lim = rhs;
            hi_lim = rhs + std::abs(rg);
            break;
          case RowSense::le:
            lo_lim = rhs - std::abs(rg);
            hi_lim = rhs;
            break;
          case RowSense::eq:
            lo_lim = std::min(rhs, rhs + rg);
            hi_lim = std::max(rhs, rhs + rg);
            break;
        }
        sense = RowSense::ge;
        rhs = lo_lim;
        ExtraRow ex;
        for (double v : arow) ex.arow.push_back(-v);
        for (double v : grow) ex.grow.push_back(-v);
        ex.rhs = -hi_lim;
        extra.push_back(std::move(ex));
      }
      append_row(a, g, arow, grow);
      b.push_back(rhs);
      s.push_back(sense);
    }
    for (const ExtraRow& ex : extra) {
      append_row(a, g, ex.arow, ex.grow);
      b.push_back(ex.rhs);
      s.push_back(RowSense::ge);
    }
    if (level == 1) {
      raw.a1 = std::move(a);
      raw.g1 = std::move(g);
      raw.b1 = std::move(b);
      raw.s1 = std::move(s);
    } else {
      raw.a2 = std::move(a);
      raw.g2 = std::move(g);
      raw.b2 = std::move(b);
      raw.s2 = std::move(s);
    }
  }

  try {
    return canonicalize(raw);
  } catch (const ModelError& e) {
    throw IoError(mps_path + ": " + e.what());
  }
}

namespace {

using nlohmann::json;

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) rows.push_back(m.row(i));
  return rows;
}

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw IoError("field '" + path + "' must be an object");
  auto it = j.find(key);
  if (it == j.end())
    throw IoError("missing field '" + (path.empty() ? std::string(key) : path + "." + key) + "'");
  return *it;
}

std::string join_path(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

int get_int(const json& j, const std::string& path, const char* key) {
  const json& v = field(j, path, key);
  if (!v.is_number_integer()) throw IoError("field '" + join_path(path, key) + "' must be an integer");
  return v.get<int>();
}

std::vector<double> get_vec(const json& j, const std::string& path, const char* key, int len) {
  const json& v = field(j, path, key);
  std::string p = join_path(path, key);
  if (!v.is_array()) throw IoError("field '" + p + "' must be an array");
  if (static_cast<int>(v.size()) != len)
    throw IoError("field '" + p + "' must have " + std::to_string(len) + " entries, has " +
                  std::to_string(v.size()));
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number())
      throw IoError("field '" + p + "[" + std::to_string(k) + "]' must be a number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

Mat get_mat(const json& j, const std::string& path, const char* key, int cols) {
  const json& v = field(j, path, key);
  std::string p = join_path(path, key);
  if (!v.is_array()) throw IoError("field '" + p + "' must be an array of rows");
  Mat m(static_cast<int>(v.size()), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    std::string rp = p + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw IoError("field '" + rp + "' must be an array of " + std::to_string(cols) + " numbers");
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw IoError("field '" + rp + "[" + std::to_string(c) + "]' must be a number");
      m(static_cast<int>(i), c) = row[c].get<double>();
    }
  }
  return m;
}

}  // namespace

void write_json(const MiblpInstance& inst, const std::string& path) {
  json j;
  j["n1"] = inst.n1;
  j["n2"] = inst.n2;
  j["r1"] = inst.r1;
  j["r2"] = inst.r2;
  j["c"] = inst.c;
  j["d1"] = inst.d1;
  j["d2"] = inst.d2;
  j["a1"] = mat_to_json(inst.a1);
  j["g1"] = mat_to_json(inst.g1);
  j["b1"] = inst.b1;
  j["a2"] = mat_to_json(inst.a2);
  j["g2"] = mat_to_json(inst.g2);
  j["b2"] = inst.b2;
  j["lx"] = inst.lx;
  j["ux"] = inst.ux;
  j["ly"] = inst.ly;
  j["uy"] = inst.uy;
  if (inst.interdiction) {
    const Interdiction& s = *inst.interdiction;
    json ji;
    ji["budget_a"] = mat_to_json(s.budget_a);
    ji["budget_b"] = s.budget_b;
    ji["follower_g"] = mat_to_json(s.follower_g);
    ji["follower_rhs"] = s.follower_rhs;
    ji["u"] = s.u;
    j["interdiction"] = std::move(ji);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

MiblpInstance parse_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }

  RawInstance raw;
  raw.n1 = get_int(j, "", "n1");
  raw.n2 = get_int(j, "", "n2");
  raw.r1 = get_int(j, "", "r1");
  raw.r2 = get_int(j, "", "r2");
  raw.c = get_vec(j, "", "c", raw.n1);
  raw.d1 = get_vec(j, "", "d1", raw.n2);
  raw.d2 = get_vec(j, "", "d2", raw.n2);
  raw.a1 = get_mat(j, "", "a1", raw.n1);
  raw.g1 = get_mat(j, "", "g1", raw.n2);
  raw.b1 = get_vec(j, "", "b1", raw.a1.rows);
  raw.a2 = get_mat(j, "", "a2", raw.n1);
  raw.g2 = get_mat(j, "", "g2", raw.n2);
  raw.b2 = get_vec(j, "", "b2", raw.a2.rows);
  if (raw.g1.rows != raw.a1.rows)
    throw IoError("field 'g1' must have the same number of rows as 'a1'");
  if (raw.g2.rows != raw.a2.rows)
    throw IoError("field 'g2' must have the same number of rows as 'a2'");
  raw.s1.assign(raw.a1.rows, RowSense::ge);
  raw.s2.assign(raw.a2.rows, RowSense::ge);
  raw.lx = get_vec(j, "", "lx", raw.n1);
  raw.ux = get_vec(j, "", "ux", raw.n1);
  raw.ly = get_vec(j, "", "ly", raw.n2);
  raw.uy = get_vec(j, "", "uy", raw.n2);
  if (j.contains("interdiction")) {
    const json& ji = j["interdiction"];
    Interdiction s;
    s.budget_a = get_mat(ji, "interdiction", "budget_a", raw.n1);
    s.budget_b = get_vec(ji, "interdiction", "budget_b", s.budget_a.rows);
    s.follower_g = get_mat(ji, "interdiction", "follower_g", raw.n2);
    s.follower_rhs = get_vec(ji, "interdiction", "follower_rhs", s.follower_g.rows);
    s.u = get_vec(ji, "interdiction", "u", raw.n1);
    raw.interdiction = std::move(s);
  }
  try {
    return canonicalize(raw);
  } catch (const ModelError& e) {
    throw IoError(path + ": " + e.what());
  }
}

MiblpInstance read_instance(const std::string& path, const std::string& aux_path, bool one_based,
                            std::vector<std::string>* warnings) {
  auto ends_with = [&](const char* suffix) {
    std::string s = suffix;
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (!aux_path.empty()) return parse_mps_aux(path, aux_path, one_based, warnings);
  if (ends_with(".mps"))
    throw IoError(path + ": an MPS instance needs a companion aux file (--aux)");
  return parse_json(path);
}

}  // namespace miblp
