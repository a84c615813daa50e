#include "hyperion/errors.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace hyperion {

namespace {
std::mutex sink_mutex;
WarningSink& sink_ref() {
    static WarningSink sink;
    return sink;
}
}  // namespace

void set_warning_sink(WarningSink sink) {
    std::lock_guard lock(sink_mutex);
    sink_ref() = std::move(sink);
}

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex);
    if (sink_ref()) {
        sink_ref()(message);
    } else {
        std::clog << "warning: " << message << '\n';
    }
}

}  // namespace hyperion
