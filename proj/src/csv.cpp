#include "platoon/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace platoon::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void write_velocity_log(const std::string& path,
                        const std::vector<hv::VelocitySample>& samples,
                        double dt) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "time_s,v_hv_mps,v_av_mps\n";
  for (std::size_t k = 0; k < samples.size(); ++k)
    os << format_double(static_cast<double>(k) * dt) << ','
       << format_double(samples[k].v_hv) << ','
       << format_double(samples[k].v_av) << '\n';
}

std::vector<hv::VelocitySample> read_velocity_log(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(is, line) || line != "time_s,v_hv_mps,v_av_mps")
    throw std::runtime_error("velocity log: bad header in " + path);
  std::vector<hv::VelocitySample> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw std::runtime_error("velocity log: ragged row");
    out.push_back({std::stod(f[1]), std::stod(f[2])});
  }
  return out;
}

}  // namespace platoon::io
