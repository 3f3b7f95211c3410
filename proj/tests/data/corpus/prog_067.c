#include <stdio.h>
int process(int x, int pos)
{
    while (pos != 0) {
        int t = pos;
        pos = x % pos;
        x = t;
    }
    return x;
}
int combine(int x, int pos)
{
    int mid = process(x, pos);
    return x / mid * pos;
}
int main(void)
{
    int x = 62;
    int pos = 84;
    printf("%d %d\n", process(x, pos), combine(x, pos));
    return 0;
}
