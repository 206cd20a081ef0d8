#pragma once

#include <sstream>
#include <string>
#include <vector>

// Builders for small synthetic scenario documents used across the tests.

struct ToyExit {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double width = 2.0;
    bool entry = false;
    double entry_x = 0.0;
    double entry_y = 0.0;
};

// Rectangle [x0,x1] x [y0,y1] with explicit cell centers.
inline std::string toy_scenario(double x0, double y0, double x1, double y1,
                                const std::vector<std::pair<double, double>>& centers,
                                const std::vector<ToyExit>& exits, double cell_width = 6.0,
                                long population = 0) {
    std::ostringstream s;
    s << "{\"arena\":{\"polygon\":[[" << x0 << "," << y0 << "],[" << x1 << "," << y0 << "],["
      << x1 << "," << y1 << "],[" << x0 << "," << y1 << "]]},";
    s << "\"exits\":[";
    for (size_t i = 0; i < exits.size(); ++i) {
        const ToyExit& e = exits[i];
        if (i) s << ",";
        s << "{\"id\":" << e.id << ",\"position\":[" << e.x << "," << e.y << "],\"width_m\":"
          << e.width << ",\"critical_density\":2.2,\"thresholds\":[1.1,1.76,2.2]";
        if (e.entry) s << ",\"entry_point\":[" << e.entry_x << "," << e.entry_y << "]";
        s << "}";
    }
    s << "],\"grid\":{\"cell_width_m\":" << cell_width << ",\"centers\":[";
    for (size_t i = 0; i < centers.size(); ++i) {
        if (i) s << ",";
        s << "[" << centers[i].first << "," << centers[i].second << "]";
    }
    s << "]},\"population\":{\"count\":" << population
      << ",\"speed_min\":1.24,\"speed_max\":1.48}}";
    return s.str();
}

#ifndef CELLEVAC_DATA_DIR
#define CELLEVAC_DATA_DIR "."
#endif

inline std::string reference_scenario_path() {
    return std::string(CELLEVAC_DATA_DIR) + "/madrid_arena.scn";
}
