#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cforge/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cforge: exact experiments with SL(2,R) cocycles over interval exchanges"};
  app.set_version_flag("--version", cforge::kVersion);
  app.require_subcommand(1);
  std::string config, out_dir = "out";
  unsigned threads = 1;
  for (const auto& name : cforge::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " command");
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "worker threads for parallel searches")->check(CLI::Range(1u, 256u));
    sub->add_option("--out", out_dir, "output directory");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  std::ifstream in(config, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  const cforge::CommandOutput out = cforge::run_command(command, text.str(), threads);
  cforge::write_outputs(out, out_dir);
  if (out.exit_code != 0) {
    const auto& err = out.report.at("error");
    std::cerr << "cforge " << command << ": " << err.at("kind").get<std::string>() << ": "
              << err.at("message").get<std::string>() << "\n";
  } else {
    std::cout << out_dir << "/report.json\n";
  }
  return out.exit_code;
}
