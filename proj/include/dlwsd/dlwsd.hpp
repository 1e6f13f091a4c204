#ifndef DLWSD_DLWSD_HPP
#define DLWSD_DLWSD_HPP

#include "commands.hpp"
#include "config.hpp"
#include "corpus.hpp"
#include "corpus_io.hpp"
#include "dlist.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "ratio.hpp"
#include "selection.hpp"

#endif
