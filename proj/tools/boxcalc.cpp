#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "boxcalc/cli.hpp"

int main(int argc, char** argv) {
  using boxcalc::cli::RunConfig;
  RunConfig c;
  CLI::App app{"Box-derivative calculus: derivatives, identity meters, Euler-Lagrange residuals"};
  app.set_help_flag("--help", "Print this help and exit");
  app.set_config("--config", "", "key = value file; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("command", c.command, "Operation to run")
      ->check(CLI::IsMember(boxcalc::cli::commands()));

  app.add_option("--f", c.f, "Function of x (or x1, x2)");
  app.add_option("--g", c.g, "Second function");
  app.add_option("--F", c.F, "F for integration by parts");
  app.add_option("--G", c.G, "G for integration by parts");
  app.add_option("--w", c.w, "Test function w for integration by parts");
  app.add_option("--L", c.L, "Lagrangian in x, y, v1.., xi");
  app.add_option("--theta", c.theta, "Constraint integrand");
  app.add_option("--y", c.y, "Trajectory");
  app.add_option("--C", c.C, "Constraint level");
  app.add_option("--xi", c.xi, "Parameter value; omitted = solve for it");
  app.add_option("--grid", c.grid, "a b n  |  a b c d n [n2]")->expected(3, 6);
  app.add_option("--h", c.h, "Step (a multiple of the grid spacing)");
  app.add_option("--levels", c.levels, "Length of the h-sequence");
  app.add_option("--ratio", c.ratio, "Geometric decay of the h-sequence");
  app.add_option("--tau", c.tau, "Non-convergence threshold of the scale fit");
  app.add_option("--hs", c.hs, "Explicit h-sequence")->delimiter(',');
  app.add_option("--order", c.order, "Derivative or Lagrangian order");
  app.add_option("--at", c.at, "Report the value at this node");
  app.add_option("--sigma", c.sigma, "Direction of the one-sided h-derivative at --at");
  app.add_option("--boundary", c.boundary, "fixed or free")
      ->check(CLI::IsMember({"fixed", "free"}));
  app.add_flag("--zero-boundary", c.zero_boundary, "Drop the contour term (w = 0 on the boundary)");
  app.add_option("--tol", c.tol, "Absolute tolerance");
  app.add_option("--smooth-constant", c.smooth_constant, "C in the C*h*scale tolerance");
  app.add_flag("--condition3", c.condition3, "Check the vanishing E-part condition");
  app.add_option("--boundary-csv", c.boundary_csv, "Membrane edge samples: edge,k,re,im");
  app.add_option("--meter", c.meter, "Meter swept by study")
      ->check(CLI::IsMember(boxcalc::cli::study_meters()));
  app.add_flag("--grid-sweep", c.grid_sweep, "Refine the grid with h in a study");
  app.add_option("--json", c.json_path, "JSON report path (default: stdout)");
  app.add_option("--csv", c.csv_path, "CSV output path");
  app.add_option("--dat", c.dat_path, "Two-column h/defect data path (study)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: ConfigInvalid: " << e.what() << "\n";
    return 1;
  }
  return boxcalc::cli::run(c);
}
