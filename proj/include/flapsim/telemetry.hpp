#pragma once

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flapsim/errors.hpp"
#include "flapsim/geometry.hpp"
#include "flapsim/mission.hpp"

namespace flapsim {

/// One telemetry row, sampled at the control rate.
struct TelemetryRecord {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  EulerZxy euler;
  Vec3 body_rates = Vec3::Zero();
  double u1 = 0.0, u2 = 0.0, u3 = 0.0;
  double mz_cmd = 0.0;  // discarded yaw torque command
  std::array<double, 3> frequency{0.0, 0.0, 0.0};
  std::array<double, 3> throttle{0.0, 0.0, 0.0};
  Mode mode = Mode::kGrounded;
  double battery_mah = 0.0;
  std::array<bool, 3> saturated{false, false, false};
};

namespace detail {

/// Shortest round-trip decimal form, so CSV -> double -> CSV is lossless.
inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{}) {
    throw Error("telemetry: bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

/// Time-indexed log with a fixed column schema. Rows must arrive with
/// strictly increasing timestamps.
class TelemetryLog {
 public:
  static constexpr const char* kCsvHeader =
      "t,px,py,pz,vx,vy,vz,roll,pitch,yaw,wx,wy,wz,"
      "u1,u2,u3,mz_cmd,f1,f2,f3,thr1,thr2,thr3,mode,battery_mah,"
      "sat1,sat2,sat3";

  void append(const TelemetryRecord& r) {
    if (!rows_.empty() && r.t <= rows_.back().t) {
      throw Error("TelemetryLog: timestamps must strictly increase");
    }
    rows_.push_back(r);
  }

  const std::vector<TelemetryRecord>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }

  void write_csv(std::ostream& os) const {
    std::string buf;
    buf.reserve(rows_.size() * 160 + 64);
    buf += kCsvHeader;
    buf += '\n';
    for (const TelemetryRecord& r : rows_) {
      append_row(buf, r);
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }

  std::string to_csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
  }

  static TelemetryLog read_csv(std::istream& is) {
    TelemetryLog log;
    std::string line;
    if (!std::getline(is, line)) throw Error("telemetry csv: empty stream");
    if (line != kCsvHeader) throw Error("telemetry csv: unexpected header");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      log.append(parse_row(line));
    }
    return log;
  }

 private:
  static void append_row(std::string& buf, const TelemetryRecord& r) {
    using detail::append_number;
    auto num = [&buf](double v) {
      append_number(buf, v);
      buf += ',';
    };
    num(r.t);
    for (int i = 0; i < 3; ++i) num(r.position(i));
    for (int i = 0; i < 3; ++i) num(r.velocity(i));
    num(r.euler.roll);
    num(r.euler.pitch);
    num(r.euler.yaw);
    for (int i = 0; i < 3; ++i) num(r.body_rates(i));
    num(r.u1);
    num(r.u2);
    num(r.u3);
    num(r.mz_cmd);
    for (double f : r.frequency) num(f);
    for (double th : r.throttle) num(th);
    buf += mode_name(r.mode);
    buf += ',';
    num(r.battery_mah);
    buf += r.saturated[0] ? '1' : '0';
    buf += ',';
    buf += r.saturated[1] ? '1' : '0';
    buf += ',';
    buf += r.saturated[2] ? '1' : '0';
    buf += '\n';
  }

  static TelemetryRecord parse_row(const std::string& line) {
    std::vector<std::string_view> fields;
    std::string_view sv(line);
    std::size_t start = 0;
    for (std::size_t i = 0; i <= sv.size(); ++i) {
      if (i == sv.size() || sv[i] == ',') {
        fields.push_back(sv.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 28) {
      throw Error("telemetry csv: expected 28 fields, got " +
                  std::to_string(fields.size()));
    }
    using detail::parse_number;
    TelemetryRecord r;
    int k = 0;
    r.t = parse_number(fields[k++]);
    for (int i = 0; i < 3; ++i) r.position(i) = parse_number(fields[k++]);
    for (int i = 0; i < 3; ++i) r.velocity(i) = parse_number(fields[k++]);
    r.euler.roll = parse_number(fields[k++]);
    r.euler.pitch = parse_number(fields[k++]);
    r.euler.yaw = parse_number(fields[k++]);
    for (int i = 0; i < 3; ++i) r.body_rates(i) = parse_number(fields[k++]);
    r.u1 = parse_number(fields[k++]);
    r.u2 = parse_number(fields[k++]);
    r.u3 = parse_number(fields[k++]);
    r.mz_cmd = parse_number(fields[k++]);
    for (int i = 0; i < 3; ++i) r.frequency[i] = parse_number(fields[k++]);
    for (int i = 0; i < 3; ++i) r.throttle[i] = parse_number(fields[k++]);
    r.mode = mode_from_name(std::string(fields[k++]));
    r.battery_mah = parse_number(fields[k++]);
    for (int i = 0; i < 3; ++i) r.saturated[i] = fields[k++] == "1";
    return r;
  }

  std::vector<TelemetryRecord> rows_;
};

}  // namespace flapsim
