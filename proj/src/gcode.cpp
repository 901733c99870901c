#include "kerf/gcode.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "kerf/errors.hpp"

namespace kerf {

namespace {

constexpr double kSamePoint = 1e-9;
constexpr double kRadiusExact = 1e-6;
constexpr double kRadiusRepairable = 1e-3;

enum class Motion { Rapid, Linear, ArcCW, ArcCCW };

struct Word {
  char letter;
  double value;
  std::string_view text;
};

// Line-local failure; becomes exactly one error diagnostic.
struct LineError {
  std::string message;
};

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string word_label(const Word& w) {
  std::string s(1, w.letter);
  if (w.letter == 'G' || w.letter == 'M') {
    const double r = std::round(w.value);
    if (r == w.value) return s + std::to_string(static_cast<long>(r));
  }
  s += w.text.substr(1);
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Blanks out comments; returns the code part of the line.
std::string strip_comments(std::string_view line) {
  std::string code;
  code.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == ';') break;
    if (c == '(') {
      const std::size_t close = line.find(')', i);
      if (close == std::string_view::npos) throw LineError{"unterminated comment"};
      code.push_back(' ');
      i = close;
      continue;
    }
    code.push_back(c);
  }
  return code;
}

std::vector<Word> tokenize(std::string_view code) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < code.size()) {
    if (std::isspace(static_cast<unsigned char>(code[i]))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(code[i])));
    if (!std::isalpha(static_cast<unsigned char>(letter)))
      throw LineError{"unexpected character '" + std::string(1, code[i]) + "'"};
    ++i;
    while (i < code.size() && code[i] == ' ') ++i;
    std::size_t num_begin = i;
    if (i < code.size() && (code[i] == '+' || code[i] == '-')) ++i;
    while (i < code.size() && (std::isdigit(static_cast<unsigned char>(code[i])) || code[i] == '.')) ++i;
    std::string number(code.substr(num_begin, i - num_begin));
    if (!number.empty() && number.front() == '+') number.erase(0, 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (number.empty() || ec != std::errc{} || ptr != number.data() + number.size() ||
        !std::isfinite(value))
      throw LineError{"malformed word '" + std::string(trim(code.substr(begin, i - begin + 1))) + "'"};
    words.push_back({letter, value, code.substr(begin, i - begin)});
  }
  return words;
}

struct State {
  Point3 position;
  std::optional<Motion> motion;
  Plane plane = Plane::XY;
  std::optional<double> feed;  // mm/s
};

struct LineWords {
  std::optional<double> axis[3];
  std::optional<double> offset[3];
  std::optional<double> radius;
  std::optional<double> feed;
  std::optional<Motion> motion;
  std::optional<Plane> plane;
  bool has_axis() const { return axis[0] || axis[1] || axis[2]; }
  bool has_offset() const { return offset[0] || offset[1] || offset[2]; }
};

void set_once(std::optional<double>& slot, const Word& w) {
  if (slot) throw LineError{"duplicate word " + std::string(1, w.letter)};
  slot = w.value;
}

LineWords interpret(const std::vector<Word>& words, std::vector<std::string>& ignored) {
  LineWords lw;
  for (const Word& w : words) {
    switch (w.letter) {
      case 'N': break;
      case 'G': {
        const double g = w.value;
        std::optional<Motion> m;
        std::optional<Plane> p;
        if (g == 0) m = Motion::Rapid;
        else if (g == 1) m = Motion::Linear;
        else if (g == 2) m = Motion::ArcCW;
        else if (g == 3) m = Motion::ArcCCW;
        else if (g == 17) p = Plane::XY;
        else if (g == 18) p = Plane::XZ;
        else if (g == 19) p = Plane::YZ;
        else if (g == 21 || g == 90) break;
        else {
          std::string note;
          if (g == 20) note = " (inch units)";
          else if (g == 91) note = " (incremental coordinates)";
          throw LineError{"unsupported word " + word_label(w) + note};
        }
        if (m) {
          if (lw.motion) throw LineError{"conflicting motion words"};
          lw.motion = m;
        }
        if (p) {
          if (lw.plane) throw LineError{"conflicting plane words"};
          lw.plane = p;
        }
        break;
      }
      case 'X': set_once(lw.axis[0], w); break;
      case 'Y': set_once(lw.axis[1], w); break;
      case 'Z': set_once(lw.axis[2], w); break;
      case 'I': set_once(lw.offset[0], w); break;
      case 'J': set_once(lw.offset[1], w); break;
      case 'K': set_once(lw.offset[2], w); break;
      case 'R': set_once(lw.radius, w); break;
      case 'F': set_once(lw.feed, w); break;
      case 'S':
      case 'T':
      case 'M': ignored.push_back(word_label(w)); break;
      default: throw LineError{"unsupported word " + word_label(w)};
    }
  }
  return lw;
}

int plane_normal_axis(Plane plane) {
  switch (plane) {
    case Plane::XY: return 2;
    case Plane::XZ: return 1;
    case Plane::YZ: return 0;
  }
  return 2;
}

Point3 reproject_center(Point3 start, Point3 end, Point3 center) {
  const Point3 mid = 0.5 * (start + end);
  const Vec3 d = normalized(end - start);
  return center - dot(center - mid, d) * d;
}

// Applies one line to the state. Returns the block it produced, if any.
std::optional<Block> execute(const LineWords& lw, State& st, int line_no,
                             std::vector<ParseDiagnostic>& diags, std::string_view text) {
  if (lw.plane) st.plane = *lw.plane;
  if (lw.feed) {
    if (!(*lw.feed > 0.0)) throw LineError{"feed must be positive"};
    st.feed = *lw.feed / 60.0;
  }
  if (lw.motion) st.motion = *lw.motion;

  const bool arc_words = lw.has_offset() || lw.radius.has_value();
  const bool arc_mode = st.motion == Motion::ArcCW || st.motion == Motion::ArcCCW;
  if (!lw.has_axis() && !(arc_mode && lw.motion && lw.has_offset())) {
    if (arc_words) throw LineError{"arc word without an end point"};
    return std::nullopt;
  }
  if (!st.motion) throw LineError{"no active motion mode"};
  if (arc_words && !arc_mode) throw LineError{"arc word outside G2/G3"};

  Point3 target = st.position;
  if (lw.axis[0]) target.x = *lw.axis[0];
  if (lw.axis[1]) target.y = *lw.axis[1];
  if (lw.axis[2]) target.z = *lw.axis[2];

  auto warn = [&](std::string msg) {
    diags.push_back({line_no, Severity::Warning, std::move(msg), std::string(text)});
  };

  if (*st.motion == Motion::Rapid || *st.motion == Motion::Linear) {
    const bool rapid = *st.motion == Motion::Rapid;
    if (!rapid && !st.feed) throw LineError{"feed not set before cutting move"};
    if (distance(st.position, target) <= kSamePoint) {
      warn("zero-length move ignored");
      return std::nullopt;
    }
    Block b = make_linear(st.position, target, rapid ? 0.0 : *st.feed, rapid, line_no);
    st.position = target;
    return b;
  }

  if (!st.feed) throw LineError{"feed not set before cutting move"};
  const bool clockwise = *st.motion == Motion::ArcCW;
  const int normal_axis = plane_normal_axis(st.plane);
  if (std::abs(target[normal_axis] - st.position[normal_axis]) > kRadiusExact)
    throw LineError{"helical arcs are not supported"};
  if (lw.has_offset() && lw.radius) throw LineError{"arc with both IJK and R"};
  if (!lw.has_offset() && !lw.radius) throw LineError{"arc with neither IJK nor R"};

  ArcDesignation designation;
  if (lw.radius) {
    designation = SignedRadius{*lw.radius};
  } else {
    if (lw.offset[normal_axis] && std::abs(*lw.offset[normal_axis]) > kSamePoint) {
      static constexpr char letters[] = {'I', 'J', 'K'};
      throw LineError{std::string("offset ") + letters[normal_axis] + " lies outside the " +
                      std::string(plane_name(st.plane)) + " plane"};
    }
    Vec3 ijk{lw.offset[0].value_or(0.0), lw.offset[1].value_or(0.0), lw.offset[2].value_or(0.0)};
    designation = CenterOffsets{ijk};
  }

  Point3 center;
  try {
    center = resolve_arc_center(st.position, target, designation, st.plane, clockwise);
  } catch (const ArcError& e) {
    throw LineError{e.what()};
  }

  if (std::holds_alternative<CenterOffsets>(designation)) {
    const double mismatch = std::abs(distance(center, st.position) - distance(center, target));
    if (mismatch > kRadiusRepairable) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "arc radius mismatch %.6f mm", mismatch);
      throw LineError{buf};
    }
    if (mismatch > kRadiusExact) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "arc radius mismatch %.6f mm; center re-projected", mismatch);
      warn(buf);
      center = reproject_center(st.position, target, center);
    }
  }

  Block b = make_arc(st.position, target, center, st.plane, clockwise, *st.feed, line_no);
  st.position = target;
  return b;
}

}  // namespace

bool ParseResult::has_errors() const { return error_count() > 0; }

std::size_t ParseResult::error_count() const {
  return static_cast<std::size_t>(std::count_if(
      diagnostics.begin(), diagnostics.end(),
      [](const ParseDiagnostic& d) { return d.severity == Severity::Error; }));
}

Point3 resolve_arc_center(Point3 start, Point3 end, const ArcDesignation& designation, Plane plane,
                          bool clockwise) {
  if (const auto* off = std::get_if<CenterOffsets>(&designation)) return start + off->ijk;

  const double r = std::get<SignedRadius>(designation).r;
  const Vec3 chord = end - start;
  const double c = norm(chord);
  if (c <= kSamePoint) throw ArcError("R-form arc cannot describe a full circle");
  const double half = 0.5 * c;
  const double radius = std::abs(r);
  if (radius < half - kSamePoint * std::max(1.0, half))
    throw ArcError("unrepresentable arc: radius smaller than half the chord");
  // A radius within tolerance of the half chord is a semicircle; the square
  // root would otherwise blow rounding noise up to ~1e-7 mm.
  const double offset = radius - half <= kSamePoint * std::max(1.0, half)
                            ? 0.0
                            : std::sqrt(radius * radius - half * half);
  const Vec3 d = chord / c;
  const Vec3 left = cross(plane_normal(plane), d);
  // Counter-clockwise arcs of at most half a turn keep the centre on the left.
  double side = clockwise ? -1.0 : 1.0;
  if (r < 0.0) side = -side;
  return 0.5 * (start + end) + (side * offset) * left;
}

ParseResult parse_program(std::string_view text, Point3 start) {
  ParseResult result;
  State st;
  st.position = start;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const std::string_view shown = trim(raw);
    if (shown.empty() || shown.front() == '%') {
      if (eol == text.size()) break;
      continue;
    }

    try {
      const std::vector<Word> words = tokenize(strip_comments(raw));
      std::vector<std::string> ignored;
      const LineWords lw = interpret(words, ignored);
      State next = st;
      std::vector<ParseDiagnostic> line_diags;
      std::optional<Block> block = execute(lw, next, line_no, line_diags, shown);
      for (const std::string& w : ignored)
        result.diagnostics.push_back(
            {line_no, Severity::Warning, "ignored word " + w, std::string(shown)});
      result.diagnostics.insert(result.diagnostics.end(), line_diags.begin(), line_diags.end());
      st = next;
      if (block) result.path.blocks.push_back(std::move(*block));
    } catch (const LineError& e) {
      result.diagnostics.push_back({line_no, Severity::Error, e.message, std::string(shown)});
    } catch (const Error& e) {
      result.diagnostics.push_back({line_no, Severity::Error, e.what(), std::string(shown)});
    }
    if (eol == text.size()) break;
  }
  return result;
}

std::string emit_gcode(const ToolPath& path) {
  std::string out = "G21 G90\n";
  auto xyz = [](Point3 p) {
    return "X" + format_number(p.x) + " Y" + format_number(p.y) + " Z" + format_number(p.z);
  };
  for (const Block& b : path.blocks) {
    if (!b.is_arc()) {
      out += b.rapid ? "G0 " : "G1 ";
      out += xyz(b.end());
      if (!b.rapid) out += " F" + format_number(b.feed * 60.0);
      out += '\n';
      continue;
    }
    const ArcMove& a = b.arc();
    const Vec3 off = a.center - a.start;
    std::string words;
    switch (a.plane) {
      case Plane::XY: words = "G17 "; break;
      case Plane::XZ: words = "G18 "; break;
      case Plane::YZ: words = "G19 "; break;
    }
    words += a.clockwise ? "G2 " : "G3 ";
    words += xyz(a.end);
    if (a.plane != Plane::YZ) words += " I" + format_number(off.x);
    if (a.plane != Plane::XZ) words += " J" + format_number(off.y);
    if (a.plane != Plane::XY) words += " K" + format_number(off.z);
    words += " F" + format_number(b.feed * 60.0);
    out += words + '\n';
  }
  return out;
}

}  // namespace kerf
