#include "platoon/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace platoon::io {

namespace {

constexpr double kWidth = 860.0;
constexpr double kPanelHeight = 280.0;
constexpr double kMarginLeft = 64.0, kMarginRight = 16.0;
constexpr double kMarginTop = 28.0, kMarginBottom = 40.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range data_range(const std::vector<Series>& series, bool y_axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    const auto& v = y_axis ? s.y : s.x;
    for (double val : v) {
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
  }
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (y_axis) {
    const double pad = 0.06 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi};
}

double nice_step(double range, int target_ticks) {
  const double raw = range / std::max(target_ticks, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 5.0, 10.0})
    if (raw <= mult * mag) return mult * mag;
  return 10.0 * mag;
}

void render_panel(std::ostringstream& os, const Panel& panel, double top,
                  const std::string& x_label, bool last_panel) {
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
  const double x0 = kMarginLeft, y0 = top + kMarginTop;

  const Range xr = data_range(panel.series, false);
  const Range yr = data_range(panel.series, true);
  const auto sx = [&](double x) {
    return x0 + (x - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  const auto sy = [&](double y) {
    return y0 + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\""
     << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
     << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(top + 18.0)
     << "\" font-size=\"14\" font-family=\"sans-serif\">" << panel.title
     << "</text>\n";

  const double ystep = nice_step(yr.hi - yr.lo, 5);
  for (double ty = std::ceil(yr.lo / ystep) * ystep; ty <= yr.hi + 1e-12;
       ty += ystep) {
    const double py = sy(ty);
    os << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py) << "\" x2=\""
       << fmt(x0 + plot_w) << "\" y2=\"" << fmt(py)
       << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    os << "<text x=\"" << fmt(x0 - 8.0) << "\" y=\"" << fmt(py + 4.0)
       << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\">"
       << fmt_tick(ty) << "</text>\n";
  }
  const double xstep = nice_step(xr.hi - xr.lo, 7);
  for (double tx = std::ceil(xr.lo / xstep) * xstep; tx <= xr.hi + 1e-12;
       tx += xstep) {
    const double px = sx(tx);
    os << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(y0 + plot_h)
       << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(y0 + plot_h + 4.0)
       << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    if (last_panel)
      os << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(y0 + plot_h + 18.0)
         << "\" font-size=\"11\" font-family=\"sans-serif\" "
            "text-anchor=\"middle\">"
         << fmt_tick(tx) << "</text>\n";
  }
  os << "<text transform=\"translate(" << fmt(x0 - 44.0) << ","
     << fmt(y0 + plot_h / 2.0)
     << ") rotate(-90)\" font-size=\"12\" font-family=\"sans-serif\" "
        "text-anchor=\"middle\">"
     << panel.y_label << "</text>\n";
  if (last_panel)
    os << "<text x=\"" << fmt(x0 + plot_w / 2.0) << "\" y=\""
       << fmt(y0 + plot_h + 34.0)
       << "\" font-size=\"12\" font-family=\"sans-serif\" "
          "text-anchor=\"middle\">"
       << x_label << "</text>\n";

  double legend_x = x0 + 10.0;
  for (const auto& s : panel.series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\"";
    if (s.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) os << ' ';
      os << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i]));
    }
    os << "\"/>\n";
    os << "<line x1=\"" << fmt(legend_x) << "\" y1=\"" << fmt(y0 + 12.0)
       << "\" x2=\"" << fmt(legend_x + 18.0) << "\" y2=\"" << fmt(y0 + 12.0)
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) os << " stroke-dasharray=\"6,4\"";
    os << "/>\n";
    os << "<text x=\"" << fmt(legend_x + 22.0) << "\" y=\"" << fmt(y0 + 16.0)
       << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label
       << "</text>\n";
    legend_x += 26.0 + 7.0 * static_cast<double>(s.label.size()) + 12.0;
  }
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels,
                       const std::string& x_label) {
  const double height = kPanelHeight * static_cast<double>(panels.size());
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth)
     << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(kWidth)
     << ' ' << fmt(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p)
    render_panel(os, panels[p], kPanelHeight * static_cast<double>(p), x_label,
                 p + 1 == panels.size());
  os << "</svg>\n";
  return os.str();
}

std::string render_sim_svg(const sim::SimLog& log, double delta) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                  "#d62728", "#9467bd"};
  const int na = log.n_av;
  std::vector<double> t;
  t.reserve(log.rows.size());
  for (const auto& r : log.rows) t.push_back(r.time);

  Panel vel{"Velocity tracking", "velocity (m/s)", {}};
  {
    Series ref{"v_ref", "#555", t, {}, true};
    for (const auto& r : log.rows) ref.y.push_back(r.v_ref);
    vel.series.push_back(std::move(ref));
    for (int j = 0; j < na; ++j) {
      Series s{"AV" + std::to_string(j + 1), kColors[j % 5], t, {}, false};
      for (const auto& r : log.rows) s.y.push_back(r.av_velocity[j]);
      vel.series.push_back(std::move(s));
    }
    Series hv{"HV", kColors[4], t, {}, false};
    for (const auto& r : log.rows) hv.y.push_back(r.hv_velocity);
    vel.series.push_back(std::move(hv));
  }

  Panel dist{"Inter-vehicle distance", "distance (m)", {}};
  {
    Series dl{"fixed gap", "#999", t, std::vector<double>(t.size(), delta),
              true};
    dist.series.push_back(std::move(dl));
    Series tb{"tightened bound", "#d62728", t, {}, true};
    for (const auto& r : log.rows) tb.y.push_back(r.tightened_bound);
    dist.series.push_back(std::move(tb));
    for (int j = 0; j + 1 < na; ++j) {
      Series s{"AV" + std::to_string(j + 1) + "-AV" + std::to_string(j + 2),
               kColors[j % 5], t, {}, false};
      for (const auto& r : log.rows) s.y.push_back(r.gaps[j]);
      dist.series.push_back(std::move(s));
    }
    Series sh{"AV" + std::to_string(na) + "-HV", kColors[3], t, {}, false};
    for (const auto& r : log.rows) sh.y.push_back(r.gaps[na - 1]);
    dist.series.push_back(std::move(sh));
  }

  Panel acc{"Applied acceleration", "acceleration (m/s^2)", {}};
  for (int j = 0; j < na; ++j) {
    Series s{"AV" + std::to_string(j + 1), kColors[j % 5], t, {}, false};
    for (const auto& r : log.rows) s.y.push_back(r.av_accel[j]);
    acc.series.push_back(std::move(s));
  }

  return render_svg({vel, dist, acc}, "time (s)");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

}  // namespace platoon::io
