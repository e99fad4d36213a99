// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>
#include <companion/http_server.hpp>
#include <companion/service.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <cstdlib>
#include <pthread.h>
#include <thread>

int main(int argc, char** argv)
{
    auto app = CLI::App { "Companion session service (REST + WebSocket)" };
    auto bind = std::string { "127.0.0.1:8080" };
    if (auto const* env = std::getenv("COMPANION_BIND"); env && *env)
        bind = env;
    std::optional<std::string> data_dir, backend, library;
    int threads = 4;
    app.add_option("--bind", bind, "host:port (COMPANION_BIND)")->capture_default_str();
    app.add_option("--data-dir", data_dir, "Session storage (COMPANION_DATA_DIR)");
    app.add_option("--backend", backend, "scripted:FILE or live (COMPANION_BACKEND)");
    app.add_option("--library", library, "Vocabulary manifest (COMPANION_LIBRARY)");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e) == 0 ? 0 : 2;
    }

    auto const colon = bind.rfind(':');
    if (colon == std::string::npos)
    {
        fmt::print(stderr, "error: --bind expects host:port\n");
        return 2;
    }
    auto const host = bind.substr(0, colon);
    auto port = 0;
    try
    {
        port = std::stoi(bind.substr(colon + 1));
    }
    catch (const std::exception&)
    {
        port = -1;
    }
    if (port < 0 || port > 65535)
    {
        fmt::print(stderr, "error: bad port in '{}'\n", bind);
        return 2;
    }

    // Block termination signals in every thread; the main thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try
    {
        auto config = companion::ServiceConfig::from_env();
        if (data_dir)
            config.data_dir = *data_dir;
        if (backend)
            config.default_backend = *backend;
        if (library)
            config.library = companion::load_library(*library, companion::LibraryMode::images_and_methods);

        auto service = companion::SessionService(std::move(config));
        auto server = companion::HttpServer(service, host, static_cast<std::uint16_t>(port), threads);
        server.start();
        fmt::print("listening on {}:{}\n", host, server.port());
        std::fflush(stdout);

        auto waiter = std::thread([&] { server.wait(); });
        int received = 0;
        sigwait(&signals, &received);
        server.stop();
        waiter.join();
        return 0;
    }
    catch (const companion::Error& e)
    {
        fmt::print(stderr, "error: {}: {}\n", companion::to_string(e.code()), e.what());
        return 1;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
