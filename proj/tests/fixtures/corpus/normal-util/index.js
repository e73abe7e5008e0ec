'use strict';

const DEFAULTS = { separator: '-', lower: true, maxLength: 80 };

function normalize(input) {
  if (typeof input !== 'string') {
    throw new TypeError('expected a string');
  }
  return input.normalize('NFKD').replace(/[\u0300-\u036f]/g, '');
}

function slugify(input, options) {
  const opts = Object.assign({}, DEFAULTS, options);
  let text = normalize(input);
  if (opts.lower) {
    text = text.toLowerCase();
  }
  text = text
    .replace(/[^a-zA-Z0-9\s-]/g, '')
    .trim()
    .replace(/[\s-]+/g, opts.separator);
  if (text.length > opts.maxLength) {
    text = text.slice(0, opts.maxLength);
    const cut = text.lastIndexOf(opts.separator);
    if (cut > 0) {
      text = text.slice(0, cut);
    }
  }
  return text;
}

function unique(list, options) {
  const seen = new Map();
  return list.map((item) => {
    const base = slugify(item, options);
    const count = seen.get(base) || 0;
    seen.set(base, count + 1);
    return count === 0 ? base : `${base}-${count}`;
  });
}

module.exports = slugify;
module.exports.unique = unique;
module.exports.normalize = normalize;
