#pragma once

#include <memory>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace hqva::harness {

// Diagnostics go to stderr so reports on stdout stay parseable.
inline std::shared_ptr<spdlog::logger> log() {
    static const std::shared_ptr<spdlog::logger> logger = [] {
        auto l = spdlog::get("hqva");
        if (!l) l = spdlog::stderr_color_mt("hqva");
        l->set_pattern("hqva: %l: %v");
        return l;
    }();
    return logger;
}

}  // namespace hqva::harness
