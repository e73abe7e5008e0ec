'use strict';

module.exports = padStart;

/**
 * Pads `value` on the left until it is `width` characters long.
 */
function padStart(value, width, fill) {
  if (typeof width !== 'number') {
    throw new TypeError('width must be a number');
  }
  var text = String(value);
  var missing = width - text.length;
  if (missing <= 0) {
    return text;
  }

  if (fill === undefined || fill === null) {
    fill = ' ';
  }
  fill = String(fill);
  if (fill.length === 0) {
    return text;
  }

  var prefix = '';
  while (prefix.length < missing) {
    prefix += fill;
  }
  // trim a multi-char fill back down
  if (prefix.length > missing) {
    prefix = prefix.slice(0, missing);
  }
  return prefix + text;
}
