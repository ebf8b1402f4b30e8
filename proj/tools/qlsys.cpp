/**
 * Copyright 2026, The qlsys authors.
 *
 * This source code and the accompanying materials are made available under
 * the terms of the Apache License 2.0.
 */

#include <iostream>

#include "qlsys/cli.hpp"

int main(int argc, char** argv) { return qlsys::cli::run(argc, argv, std::cout, std::cerr); }
