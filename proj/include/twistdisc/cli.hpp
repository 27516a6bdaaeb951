#pragma once
/*
 * Command-line entry point.  Subcommands: gen-basis, check-twist, teleport,
 * discriminate, verify, scan-pl.  JSON reports go to stdout (or --out); a
 * one-line human summary goes to stderr unless --json-only is set.
 *
 * Exit codes: 0 success (YES where applicable), 1 NO / failed assertion,
 * 2 UNKNOWN, 64 usage error, 65 data error.
 */

namespace twistdisc {

int cli_main(int argc, const char* const* argv);

}  // namespace twistdisc
