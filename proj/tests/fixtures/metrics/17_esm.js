import fs from 'node:fs';
import { a, b } from './ab.js';
import * as ns from '@scope/pkg';
import 'side-effect';
export { c } from './c.js';
export * from 'reexported';
export const value = 42;
const lazy = import('./lazy.js');
