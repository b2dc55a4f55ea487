#ifndef PLATOON_CSV_HPP_
#define PLATOON_CSV_HPP_

#include <string>
#include <vector>

#include "platoon/hv_model.hpp"

namespace platoon::io {

// Decimal text with 17 significant digits; round-trips a double exactly.
std::string format_double(double v);

std::vector<std::string> split_csv_line(const std::string& line);

// Velocity log schema: header "time_s,v_hv_mps,v_av_mps".
void write_velocity_log(const std::string& path,
                        const std::vector<hv::VelocitySample>& samples,
                        double dt);
std::vector<hv::VelocitySample> read_velocity_log(const std::string& path);

}  // namespace platoon::io

#endif  // PLATOON_CSV_HPP_
