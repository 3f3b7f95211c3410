#include <stdio.h>
int check(int count, int mid)
{
    int val = 0;
    int n = 1;
    while (n <= count) {
        if (n % mid == 0)
            val++;
        n++;
    }
    return val;
}
int main(void)
{
    int count = 117;
    int mid = 2;
    int val = check(count, mid);
    printf("%d\n", val);
    return 0;
}
