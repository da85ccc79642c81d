#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "nbs/snapshot.hpp"

namespace httplib {
class Server;
}

namespace nbs {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path data_dir;
    SnapshotOptions snapshot;
    std::string cors_origin = "*";
};

// HTTP front end over an immutable snapshot. Each request pins the snapshot
// current at its start; reload builds a new one and swaps the pointer.
class Service {
public:
    explicit Service(ServiceConfig config);  // loads the data; throws on failure
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    std::shared_ptr<const Snapshot> snapshot() const;

    // Returns the new version. On failure the old snapshot keeps serving and
    // the error propagates.
    std::uint64_t reload(const std::optional<std::filesystem::path>& dir = std::nullopt);

    // Binds and serves on a background thread; returns the bound port.
    int start();
    // Binds and serves on the calling thread until stop().
    void run();
    void stop();

private:
    void install_routes();
    int bind();

    ServiceConfig config_;
    mutable std::mutex snapshot_mutex_;
    std::mutex reload_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

}  // namespace nbs
