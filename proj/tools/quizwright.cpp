#include <termios.h>
#include <unistd.h>

#include <csignal>
#include <iostream>
#include <string>

#include "quizwright/admin.hpp"

namespace {

std::optional<std::string> read_password() {
  std::string line;
  if (!::isatty(STDIN_FILENO)) {
    if (!std::getline(std::cin, line)) return std::nullopt;
    return line;
  }
  std::cerr << "Password: " << std::flush;
  termios saved{};
  ::tcgetattr(STDIN_FILENO, &saved);
  termios hidden = saved;
  hidden.c_lflag &= ~static_cast<tcflag_t>(ECHO);
  ::tcsetattr(STDIN_FILENO, TCSAFLUSH, &hidden);
  bool ok = static_cast<bool>(std::getline(std::cin, line));
  ::tcsetattr(STDIN_FILENO, TCSAFLUSH, &saved);
  std::cerr << '\n';
  if (!ok) return std::nullopt;
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  // Blocked before any thread starts so that only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  auto wait_for_signal = [&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
  };
  return qw::admin::run(argc, argv, std::cout, std::cerr, read_password, wait_for_signal);
}
