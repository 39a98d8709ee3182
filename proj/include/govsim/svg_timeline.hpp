#pragma once

// Standalone SVG 1.1 timeline for a trace: one position-vs-time polyline per
// vehicle, shaded time bands while an overtake occupies the opposing lane,
// and markers for warn/control events (bottom ribbon) and collisions (on the
// colliding vehicle). Output is byte-deterministic for a given trace.

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "govsim/harness.hpp"

namespace govsim {

namespace svg_detail {

inline std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

} // namespace svg_detail

inline void emit_timeline_svg(const Trace& trace, std::ostream& sink) {
    using svg_detail::fmt2;

    constexpr double kWidth = 960, kHeight = 480;
    constexpr double kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    Tick t_max = 1;
    double x_max = 1.0;
    std::map<std::string, std::vector<std::pair<Tick, const SnapshotVehicle*>>> tracks;
    std::map<Tick, const StateSnapshotRec*> snapshots_by_tick;
    for (const TraceEvent& event : trace.events) {
        if (const auto* snap = std::get_if<StateSnapshotRec>(&event.payload)) {
            snapshots_by_tick[event.tick] = snap;
            t_max = std::max(t_max, event.tick);
            for (const SnapshotVehicle& v : snap->vehicles) {
                x_max = std::max(x_max, v.x);
                tracks[v.id.value()].push_back({event.tick, &v});
            }
        }
    }

    const auto sx = [&](double tick) { return kLeft + tick / static_cast<double>(t_max) * plot_w; };
    const auto sy = [&](double x) { return kTop + (1.0 - x / x_max) * plot_h; };

    sink << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
         << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
         << "\">\n";
    sink << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
         << "\" height=\"" << plot_h << "\" fill=\"#fafafa\" stroke=\"none\"/>\n";

    // Shaded bands while the maneuver occupies the opposing lane.
    bool in_band = false;
    Tick band_start = 0;
    auto flush_band = [&](Tick end_tick) {
        sink << "<rect class=\"lane-shade\" x=\"" << fmt2(sx(static_cast<double>(band_start)))
             << "\" y=\"" << kTop << "\" width=\""
             << fmt2(sx(static_cast<double>(end_tick)) - sx(static_cast<double>(band_start)))
             << "\" height=\"" << plot_h << "\" fill=\"#fde2c5\" opacity=\"0.6\"/>\n";
    };
    for (const auto& [tick, snap] : snapshots_by_tick) {
        const bool occupies = phase_occupies_opposing(snap->phase);
        if (occupies && !in_band) {
            in_band = true;
            band_start = tick;
        } else if (!occupies && in_band) {
            in_band = false;
            flush_band(tick);
        }
    }
    if (in_band) flush_band(t_max);

    // Axes.
    sink << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
         << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
         << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    sink << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
         << "\" y2=\"" << kTop + plot_h << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    sink << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
         << "\" font-size=\"12\" text-anchor=\"middle\">tick (0.." << t_max << ")</text>\n";
    sink << "<text x=\"14\" y=\"" << kTop + plot_h / 2
         << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
         << fmt2(kTop + plot_h / 2) << ")\">position [m]</text>\n";

    // One polyline per vehicle; dashes mark samples taken in the opposing lane.
    size_t color_index = 0;
    for (const auto& [id, samples] : tracks) {
        const char* color =
            svg_detail::kPalette[color_index++ % (sizeof svg_detail::kPalette /
                                                  sizeof svg_detail::kPalette[0])];
        sink << "<polyline class=\"vehicle\" data-id=\"" << id << "\" fill=\"none\" stroke=\""
             << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < samples.size(); ++i) {
            if (i) sink << ' ';
            sink << fmt2(sx(static_cast<double>(samples[i].first))) << ','
                 << fmt2(sy(samples[i].second->x));
        }
        sink << "\"/>\n";
    }

    // Event markers: warn/control on the bottom ribbon, collisions on the
    // first colliding vehicle's trajectory.
    const double ribbon_y = kTop + plot_h + 14;
    for (const TraceEvent& event : trace.events) {
        if (const auto* adas = std::get_if<AdasEventRec>(&event.payload)) {
            if (adas->event.kind == AdasEvent::Kind::Warn) {
                sink << "<circle class=\"warn\" cx=\"" << fmt2(sx(static_cast<double>(event.tick)))
                     << "\" cy=\"" << fmt2(ribbon_y) << "\" r=\"2.5\" fill=\"#e69f00\"/>\n";
            } else if (adas->event.kind == AdasEvent::Kind::Control) {
                sink << "<circle class=\"control\" cx=\""
                     << fmt2(sx(static_cast<double>(event.tick))) << "\" cy=\""
                     << fmt2(ribbon_y + 8) << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
            }
        } else if (const auto* collision = std::get_if<CollisionRec>(&event.payload)) {
            double cy = ribbon_y;
            if (auto it = snapshots_by_tick.find(event.tick); it != snapshots_by_tick.end()) {
                for (const SnapshotVehicle& v : it->second->vehicles)
                    if (v.id == collision->a) cy = sy(v.x);
            }
            const double cx = sx(static_cast<double>(event.tick));
            sink << "<path class=\"collision\" d=\"M" << fmt2(cx - 5) << ' ' << fmt2(cy - 5)
                 << " L" << fmt2(cx + 5) << ' ' << fmt2(cy + 5) << " M" << fmt2(cx - 5) << ' '
                 << fmt2(cy + 5) << " L" << fmt2(cx + 5) << ' ' << fmt2(cy - 5)
                 << "\" stroke=\"#000\" stroke-width=\"2\" fill=\"none\"/>\n";
        }
    }

    sink << "</svg>\n";
}

} // namespace govsim
