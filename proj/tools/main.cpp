#include <atomic>
#include <csignal>
#include <iostream>

#include "erwlab_cli.hpp"

namespace {

std::atomic<bool> g_abort{false};

extern "C" void on_interrupt(int) { g_abort.store(true); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  return erw::cli::run(argc, argv, std::cout, std::cerr, &g_abort);
}
