const re = /ab+c/gi;
const div = 10 / 2 / 5;
const tricky = /[/]\/?/.test('a/b') ? 1 : 0;
function strip(s) { return s.replace(/\/\*.*?\*\//g, ''); }
